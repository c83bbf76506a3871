//! JSON encodings of complex matrices: a list of rows of `[re, im]` pairs.

use crate::quantum::ComplexMatrix;
use serde_json::Value;

fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn complex_matrix(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| {
                Value::Array(
                    (0..m.ncols())
                        .map(|j| Value::Array(vec![number(m[(i, j)].re), number(m[(i, j)].im)]))
                        .collect(),
                )
            })
            .collect(),
    )
}
