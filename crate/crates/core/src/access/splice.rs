use super::{AccessError, StageState};
use crate::geometry::loop_erase;
use crate::{Point, Poly};

/// A term of the access name together with its parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spliced {
    pub curve: Poly,
    /// Loop-erased stage paths that later stages can no longer change.
    pub pieces: Vec<Poly>,
    /// What is left of the last stage path followed by the final segment.
    pub tail: Poly,
    pub stage: usize,
}

/// Loop-erases `paths[0..=t]` followed by the segment from `e_t` to
/// `zeta_approx` and lays the result out with piece `j` on
/// `[1 - 2^{-j}, 1 - 2^{-j-1}]` and the tail on `[1 - 2^{-t}, 1]`.
pub fn splice(state: &StageState, t: usize, zeta_approx: &Point) -> Result<Spliced, AccessError> {
    let bad = |m: &str| AccessError::Invariant(format!("splice through stage {t}: {m}"));
    if t >= state.paths.len() {
        return Err(bad("stage not computed"));
    }
    let mut parts: Vec<Poly> = state.paths[..=t].to_vec();
    if &state.e[t] != zeta_approx {
        parts.push(Poly::new(vec![state.e[t].clone(), zeta_approx.clone()]).unwrap());
    }
    let erased = loop_erase(&parts).map_err(|e| bad(&e.to_string()))?;
    let pieces: Vec<Poly> = erased
        .pieces(t)
        .into_iter()
        .enumerate()
        .map(|(j, p)| p.ok_or_else(|| bad(&format!("piece {j} erased"))))
        .collect::<Result<_, _>>()?;
    let first = erased
        .tags
        .iter()
        .position(|&g| g >= t)
        .ok_or_else(|| bad("empty tail"))?;
    let tail = Poly::new(erased.points[first..].to_vec()).map_err(|e| bad(&e.to_string()))?;
    let curve = layout_pieces(&pieces, &tail);
    Ok(Spliced {
        curve,
        pieces,
        tail,
        stage: t,
    })
}

/// Concatenates with piece `j` on `[1 - 2^{-j}, 1 - 2^{-j-1}]` and `tail`
/// on the rest, resampling to a common uniform breakpoint grid.
pub fn layout_pieces(pieces: &[Poly], tail: &Poly) -> Poly {
    let mut parts: Vec<(&Poly, u32)> = pieces.iter().zip(1..).collect();
    parts.push((tail, pieces.len() as u32));
    layout_weighted(&parts)
}

/// Concatenates chaining curves, part `(p, w)` taking a parameter interval
/// of length `2^{-w}`; the lengths must sum to 1.
///
/// Each part is padded to a power-of-two segment count (segment `i` of `c`
/// gets `m/c` or `m/c + 1` pieces) and then split evenly, so a part's
/// parameterization never depends on its neighbours.
pub fn layout_weighted(parts: &[(&Poly, u32)]) -> Poly {
    let pow = |c: usize| c.next_power_of_two();
    let total = parts
        .iter()
        .map(|(p, w)| pow(p.pieces()) << w)
        .max()
        .expect("at least one part");
    let mut out: Vec<Point> = vec![];
    for (p, w) in parts {
        let c = p.pieces();
        let m = pow(c);
        let per = (total >> w) / m;
        let counts: Vec<usize> = (0..c)
            .map(|i| (m / c + usize::from(i < m % c)) * per)
            .collect();
        let v = p.subdivide(&counts).into_vertices();
        let skip = usize::from(!out.is_empty());
        out.extend(v.into_iter().skip(skip));
    }
    Poly::new(out).expect("parts chain without repeats")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::is_simple_polyarc;
    use crate::{ptq, Rational};

    fn q(s: &str) -> Rational {
        crate::scalar::parse_rational(s).unwrap()
    }

    fn line(v: &[(&str, &str)]) -> Poly {
        Poly::new(v.iter().map(|(x, y)| ptq(x, y)).collect()).unwrap()
    }

    fn state(paths: Vec<Poly>) -> StageState {
        StageState {
            s: (0..paths.len() as u32).collect(),
            e: paths.iter().map(|p| p.end().clone()).collect(),
            n_arc: vec![0; paths.len()],
            eps: vec![q("0"); paths.len()],
            zeta_prec: vec![0; paths.len()],
            paths,
        }
    }

    #[test]
    fn collinear_stages() {
        let st = state(vec![
            line(&[("0", "0"), ("0", "1/2")]),
            line(&[("0", "1/2"), ("0", "3/4")]),
        ]);
        let sp = splice(&st, 1, &ptq("0", "1")).unwrap();
        assert_eq!(sp.pieces, vec![line(&[("0", "0"), ("0", "1/2")])]);
        assert_eq!(sp.tail, line(&[("0", "1/2"), ("0", "3/4"), ("0", "1")]));
        let c = &sp.curve;
        assert_eq!(c.eval(&q("1/2")).unwrap(), ptq("0", "1/2"));
        assert_eq!(c.eval(&q("1/4")).unwrap(), ptq("0", "1/4"));
        assert_eq!(c.eval(&q("3/4")).unwrap(), ptq("0", "3/4"));
        assert_eq!(c.end(), &ptq("0", "1"));
    }

    #[test]
    fn reentry_truncates_earlier_piece() {
        // P1 swings back across P0
        let st = state(vec![
            line(&[("0", "0"), ("1", "0")]),
            line(&[("1", "0"), ("1", "1"), ("1/2", "1"), ("1/2", "-1/2")]),
        ]);
        let sp = splice(&st, 1, &ptq("1/2", "-1")).unwrap();
        assert_eq!(sp.pieces, vec![line(&[("0", "0"), ("1/2", "0")])]);
        assert!(is_simple_polyarc(&sp.curve));
    }

    #[test]
    fn single_stage() {
        let st = state(vec![line(&[("0", "0"), ("1", "0")])]);
        let sp = splice(&st, 0, &ptq("2", "0")).unwrap();
        assert!(sp.pieces.is_empty());
        assert_eq!(sp.curve, line(&[("0", "0"), ("1", "0"), ("2", "0")]));
    }

    #[test]
    fn layout_is_stable_under_tail_changes() {
        let a = line(&[("0", "0"), ("1", "0"), ("1", "1")]);
        let t1 = line(&[("1", "1"), ("2", "1")]);
        let t2 = line(&[("1", "1"), ("3/2", "1"), ("3/2", "2"), ("2", "2"), ("2", "3")]);
        let c1 = layout_pieces(std::slice::from_ref(&a), &t1);
        let c2 = layout_pieces(std::slice::from_ref(&a), &t2);
        for i in 0..=8 {
            let s = Rational::new(i.into(), 16.into());
            assert_eq!(c1.eval(&s).unwrap(), c2.eval(&s).unwrap());
        }
    }
}
