//! Benchmark-only crate; see `benches/`.

use mrsc::interp::Value;

/// `Cons(True, Cons(False, ...))` of the given length, alternating.
pub fn bool_list(len: usize) -> Value {
    (0..len).rev().fold(Value::atom("Nil"), |tail, i| {
        let b = if i % 2 == 0 { "True" } else { "False" };
        Value::new("Cons", vec![Value::atom(b), tail])
    })
}
