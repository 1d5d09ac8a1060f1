//! Builds a small ordinal Bayesian network by hand, prints one CPT row and
//! the posterior of the output node with and without evidence.
//!
//! ```bash
//! cargo run --example bayes_inference
//! ```

use std::collections::BTreeMap;

use gsd_alloc::bayes::{BayesNet, NetworkSpec, NodeSpec, Sign};
use gsd_alloc::Level5;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let nodes = vec![
        NodeSpec::root("staff"),
        NodeSpec::root("maturity"),
        NodeSpec::root("time_zone_shift"),
        NodeSpec::root("quality")
            .with_parent("staff", 3.0, Sign::Positive)
            .with_parent("maturity", 2.0, Sign::Positive),
        NodeSpec::root("rework")
            .with_parent("quality", 2.0, Sign::Negative)
            .with_parent("time_zone_shift", 1.0, Sign::Positive)
            .with_sigma(0.5),
    ];
    let net = BayesNet::new(NetworkSpec::new(nodes, &["rework".into()])?)?;

    let quality = net.spec().id("quality").unwrap();
    let row = net.cpt(quality).row(&[Level5::High, Level5::Medium]);
    println!("P(quality | staff=4, maturity=3) = {:.4?}", row.probabilities());

    let rework = net.spec().id("rework").unwrap();
    let prior = net.marginal(rework, &[])?;
    println!("P(rework)                        = {:.4?}  mean {:.3}", prior.probabilities(), prior.mean());

    // only some inputs observed; the rest are summed out
    let evidence = BTreeMap::from([
        ("staff".to_string(), Level5::VeryHigh),
        ("time_zone_shift".to_string(), Level5::VeryLow),
    ]);
    let by_id = [
        (net.spec().id("staff").unwrap(), Level5::VeryHigh),
        (net.spec().id("time_zone_shift").unwrap(), Level5::VeryLow),
    ];
    let post = net.marginal(rework, &by_id)?;
    println!("P(rework | staff=5, tz=1)        = {:.4?}  mean {:.3}", post.probabilities(), post.mean());

    for (name, dist) in net.infer(&evidence)? {
        println!("{name:16} mean {:.3}", dist.mean());
    }
    Ok(())
}
