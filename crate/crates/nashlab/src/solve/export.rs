//! Solution files: same numeric conventions as game spec files.

use serde_json::{Map, Value};

use super::{DiscountedNashSolution, GapMin, NashSolution};
use crate::game::io::num17;

fn arr1(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| num17(x)).collect())
}

fn arr2(v: &[Vec<f64>]) -> Value {
    Value::Array(v.iter().map(|r| arr1(r)).collect())
}

fn arr3(v: &[Vec<Vec<f64>>]) -> Value {
    Value::Array(v.iter().map(|r| arr2(r)).collect())
}

fn policy(v: &[Vec<usize>]) -> Value {
    Value::Array(
        v.iter()
            .map(|row| Value::Array(row.iter().map(|&a| Value::from(a as u64)).collect()))
            .collect(),
    )
}

fn gap_min_value(g: &GapMin) -> Value {
    match g {
        GapMin::Value(v) => num17(*v),
        GapMin::AllZero => Value::from("all-zero"),
    }
}

pub fn episodic_solution_to_json(sol: &NashSolution) -> Value {
    let mut obj = Map::new();
    obj.insert("format_version".into(), Value::from(1));
    obj.insert("kind".into(), Value::from("episodic-nash"));
    obj.insert("v".into(), arr2(&sol.vstar));
    obj.insert("q".into(), arr3(&sol.qstar));
    obj.insert("pi".into(), policy(&sol.pi_star));
    obj.insert("mu".into(), policy(&sol.mu_star));
    obj.insert("gap_plus".into(), arr3(&sol.gap_plus));
    obj.insert("gap_plus_min".into(), gap_min_value(&sol.gap_plus_min));
    Value::Object(obj)
}

pub fn discounted_solution_to_json(sol: &DiscountedNashSolution) -> Value {
    let mut obj = Map::new();
    obj.insert("format_version".into(), Value::from(1));
    obj.insert("kind".into(), Value::from("discounted-nash"));
    obj.insert("v_max_to_move".into(), arr1(&sol.vstar.max_to_move));
    obj.insert("v_min_to_move".into(), arr1(&sol.vstar.min_to_move));
    obj.insert("q_max_to_move".into(), arr2(&sol.qstar.max_to_move));
    obj.insert("q_min_to_move".into(), arr2(&sol.qstar.min_to_move));
    obj.insert(
        "pi".into(),
        Value::Array(sol.pi_star.iter().map(|&a| Value::from(a as u64)).collect()),
    );
    obj.insert(
        "mu".into(),
        Value::Array(sol.mu_star.iter().map(|&a| Value::from(a as u64)).collect()),
    );
    obj.insert("gap_plus_max_to_move".into(), arr2(&sol.gap_plus.max_to_move));
    obj.insert("gap_plus_min_to_move".into(), arr2(&sol.gap_plus.min_to_move));
    obj.insert("gap_plus_min".into(), gap_min_value(&sol.gap_plus_min));
    obj.insert("tolerance".into(), num17(sol.tolerance));
    obj.insert("residual".into(), num17(sol.residual));
    obj.insert("sweeps".into(), Value::from(sol.sweeps as u64));
    Value::Object(obj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::fixtures;
    use crate::solve::{solve_discounted, solve_episodic};

    #[test]
    fn episodic_export_carries_fixture_values() {
        let sol = solve_episodic(&fixtures::g_one());
        let json = episodic_solution_to_json(&sol);
        assert_eq!(json["v"][0][0].as_f64().unwrap(), 1.0);
        assert_eq!(json["gap_plus_min"].as_f64().unwrap(), 0.5);
    }

    #[test]
    fn all_zero_gap_exported_as_flag() {
        let sol = solve_episodic(&fixtures::zero_reward(2, 2, 2, 1));
        let json = episodic_solution_to_json(&sol);
        assert_eq!(json["gap_plus_min"].as_str().unwrap(), "all-zero");
    }

    #[test]
    fn discounted_export_shape() {
        let sol = solve_discounted(&fixtures::g_disc(), 1e-10).unwrap();
        let json = discounted_solution_to_json(&sol);
        assert!((json["v_max_to_move"][0].as_f64().unwrap() - 4.0 / 3.0).abs() <= 1e-9);
    }
}
