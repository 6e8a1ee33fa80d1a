//! Browser bindings for the demo page in `www/`. Every export takes an
//! automorphism as text, either a move word such as `N(a,b); N(b,a)` or
//! `x -> word` lines, and returns a JSON string.
//!
//! The plain functions below do the work and are what the tests call; the
//! `#[wasm_bindgen]` wrappers only convert errors to JS strings.

use freedual::automorphism::{format_moves, Automorphism, ElementaryMove};
use freedual::cli::{parse_automorphism_file, parse_move_word};
use freedual::cylinders::PrefixSet;
use freedual::dual::{build_collection, dual_apply_fast, table_for, SuffixTable};
use freedual::growth::{build_transition_matrix, empirical_growth};
use freedual::{Basis, Letter, ReducedWord};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Letters of iterated images allowed in `growth`; keeps the page responsive.
const LETTER_BUDGET: usize = 2_000_000;

struct Parsed {
    basis: Basis,
    table: SuffixTable,
    moves: Option<Vec<ElementaryMove>>,
}

fn parse(text: &str) -> Result<Parsed, String> {
    let text = text.trim();
    if text.contains("->") {
        let p = parse_automorphism_file(text, None).map_err(|e| e.to_string())?;
        let table = table_for(&p.automorphism).map_err(|e| e.to_string())?;
        return Ok(Parsed {
            basis: p.basis,
            table,
            moves: None,
        });
    }
    let (basis, moves) = parse_move_word(text, None).map_err(|e| e.to_string())?;
    let table = build_collection(&moves, basis.rank()).map_err(|e| e.to_string())?;
    Ok(Parsed {
        basis,
        table,
        moves: Some(moves),
    })
}

/// The arc `[start, start + width)` of the unit circle occupied by `C_w`.
/// The boundary is drawn with the letters of each vertex in cyclic code
/// order, starting just after the edge back to the parent.
pub fn arc(rank: usize, w: &ReducedWord) -> (f64, f64) {
    let two_n = 2 * rank;
    let (mut start, mut width) = (0.0, 1.0);
    let mut parent: Option<Letter> = None;
    for &x in w.letters() {
        let (slot, slots) = match parent {
            None => (x.code(), two_n),
            Some(p) => {
                let back = p.inverse().code();
                ((x.code() + two_n - back - 1) % two_n, two_n - 1)
            }
        };
        width /= slots as f64;
        start += slot as f64 * width;
        parent = Some(x);
    }
    (start, width)
}

fn arcs(rank: usize, set: &PrefixSet) -> Value {
    set.iter()
        .map(|w| {
            let (s, d) = arc(rank, w);
            json!([s, d])
        })
        .collect()
}

fn describe(p: &Parsed) -> Value {
    let phi: &Automorphism = p.table.automorphism();
    json!({
        "rank": p.basis.rank(),
        "letters": p.basis.letters().map(|x| p.basis.letter_char(x).to_string()).collect::<Vec<_>>(),
        "images": phi.forward().format(&p.basis),
        "moves": p.moves.as_ref().map(|m| format_moves(&p.basis, m)),
    })
}

/// `φ*(w)` with both cylinders as circle arcs.
pub fn dual_image_json(auto: &str, word: &str) -> Result<String, String> {
    let p = parse(auto)?;
    let w = p.basis.parse_word(word.trim()).map_err(|e| e.to_string())?;
    let image = dual_apply_fast(&p.table, &w);
    let rank = p.basis.rank();
    Ok(json!({
        "automorphism": describe(&p),
        "word": p.basis.format_word(&w),
        "image": image.to_strings(&p.basis),
        "arc": arcs(rank, &PrefixSet::singleton(w)),
        "image_arcs": arcs(rank, &image),
    })
    .to_string())
}

/// The suffix table `U(x)` for every letter.
pub fn suffix_table_json(auto: &str) -> Result<String, String> {
    let p = parse(auto)?;
    let rows: Vec<Value> = p
        .table
        .entries()
        .map(|(x, s)| {
            json!({
                "letter": p.basis.letter_char(x).to_string(),
                "set": s.to_strings(&p.basis),
                "arcs": arcs(p.basis.rank(), s),
            })
        })
        .collect();
    Ok(json!({
        "automorphism": describe(&p),
        "table": rows,
        "nielsen_moves": p.table.nielsen_count(),
        "max_card": p.table.max_card(),
    })
    .to_string())
}

/// Matrix eigenvalue next to `card((φ*)^k(x))^(1/k)` for `k ≤ kmax`.
pub fn growth_json(auto: &str, kmax: usize) -> Result<String, String> {
    let p = parse(auto)?;
    let est = empirical_growth(&p.table, kmax.clamp(1, 30), LETTER_BUDGET, 1e-9)
        .map_err(|e| e.to_string())?;
    Ok(json!({
        "automorphism": describe(&p),
        "matrix": build_transition_matrix(&p.table),
        "estimate": est,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn dual_image(auto: &str, word: &str) -> Result<String, JsValue> {
    dual_image_json(auto, word).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn suffix_table(auto: &str) -> Result<String, JsValue> {
    suffix_table_json(auto).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn growth(auto: &str, kmax: usize) -> Result<String, JsValue> {
    growth_json(auto, kmax).map_err(|e| JsValue::from_str(&e))
}
