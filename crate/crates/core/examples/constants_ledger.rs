//! Predicted constants for every link of the chain, from declared inputs.

use qhgeo::ledger::{predicted_constants, LedgerInputs, LemmaId};

fn main() -> qhgeo::Result<()> {
    let base = LedgerInputs { c: Some(1.0), ..Default::default() };
    let cases = [
        (LemmaId::PartialToRelative, LedgerInputs { l: Some(2.0), lambda: Some(0.5), ..base }),
        (LemmaId::RelativeToSemisolid, LedgerInputs { c1: Some(1.0), t0: Some(1.0), ..base }),
        (LemmaId::SemisolidToPartial, LedgerInputs { c2: Some(83.43), ..base }),
        (LemmaId::RelativeToLocalBilipschitz, LedgerInputs { c1: Some(1.0), t0: Some(1.0), ..base }),
        (LemmaId::LocalBilipschitzToLocalQs, LedgerInputs { l: Some(4.0), q: Some(0.125), ..base }),
        (LemmaId::LocalQsToPartial, LedgerInputs { c2: Some(1.0), q: Some(0.5), ..base }),
        (LemmaId::StepBound, LedgerInputs { a: Some(1.5), q: Some(0.5), eta_slope: Some(2.0), ..base }),
    ];
    for (lemma, inputs) in cases {
        let l = predicted_constants(lemma, inputs)?;
        let derived: Vec<String> = l.derived.iter().map(|(k, v)| format!("{k} = {v:.6}")).collect();
        println!("{lemma:?}: {}", derived.join(", "));
    }

    // out-of-range inputs name the hypothesis they break
    let err = predicted_constants(LemmaId::PartialToRelative, LedgerInputs { l: Some(2.0), lambda: Some(1.5), ..base })
        .unwrap_err();
    println!("\n{err}");
    Ok(())
}
