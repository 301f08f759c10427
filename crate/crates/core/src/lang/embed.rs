use super::syntax::Expr;

/// Homeomorphic embedding `smaller ⊴ larger`.
///
/// Any variable embeds in any variable. Otherwise `smaller` either couples
/// with `larger` (same head and arity, arguments embedded pairwise) or dives
/// into one of `larger`'s arguments.
pub fn embeds(smaller: &Expr, larger: &Expr) -> bool {
    match (smaller, larger) {
        (Expr::Var(_), Expr::Var(_)) => true,
        _ => couples(smaller, larger) || dives(smaller, larger),
    }
}

fn couples(smaller: &Expr, larger: &Expr) -> bool {
    match (smaller, larger) {
        (Expr::Ctr(n1, a1), Expr::Ctr(n2, a2)) | (Expr::Call(n1, a1), Expr::Call(n2, a2)) => {
            n1 == n2 && a1.len() == a2.len() && a1.iter().zip(a2).all(|(s, l)| embeds(s, l))
        }
        _ => false,
    }
}

fn dives(smaller: &Expr, larger: &Expr) -> bool {
    larger.args().iter().any(|l| embeds(smaller, l))
}
