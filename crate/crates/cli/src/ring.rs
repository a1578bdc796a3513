use ringcodes::families::FamilyRing;
use ringcodes::RingParams;

use crate::error::CliError;

/// Parses `z4`, `z16`, `a3`, `a3@z16`, `r4`, `r4@z16`.
pub fn parse_ring(text: &str) -> Result<FamilyRing, CliError> {
    let bad = || {
        CliError::Usage(format!(
            "--ring {text:?}: expected z<4^s>, a<k>[@z<4^s>] or r<m>[@z<4^s>]"
        ))
    };
    let (head, base) = match text.split_once('@') {
        Some((h, b)) => (h, Some(b)),
        None => (text, None),
    };
    let s_of = |z: &str| -> Result<u32, CliError> {
        let q: u128 = z
            .strip_prefix('z')
            .and_then(|d| d.parse().ok())
            .ok_or_else(bad)?;
        if q < 4 || !q.is_power_of_two() || q.trailing_zeros() % 2 != 0 {
            return Err(CliError::Usage(format!(
                "--ring {text:?}: {q} is not a power of 4"
            )));
        }
        Ok(q.trailing_zeros() / 2)
    };
    let s = base.map(s_of).transpose()?.unwrap_or(1);
    let num = |rest: &str| rest.parse::<usize>().map_err(|_| bad());
    let ring = match head.chars().next() {
        Some('z') if base.is_none() => FamilyRing::residues(s_of(head)?)?,
        Some('a') => FamilyRing::subset(num(&head[1..])?, s)?,
        Some('r') => FamilyRing::tower(RingParams::new(num(&head[1..])?, s)?),
        _ => return Err(bad()),
    };
    Ok(ring)
}
