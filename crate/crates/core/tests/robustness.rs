mod common;

use common::gen::{random_program, Limits};
use mrsc::mrsc::Supercompiler;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn random_programs_build_valid_graph_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut finished = 0;
    for i in 0..300 {
        let (p, e) = random_program(Limits::default(), &mut rng);
        // Lazy graphs can be exponentially large; only materialize small ones.
        let Ok(n) = Supercompiler::new(&p, &e).step_budget(Some(200_000)).count(&e) else {
            continue;
        };
        let gs = Supercompiler::new(&p, &e).run(&e).unwrap();
        gs.validate().unwrap_or_else(|err| panic!("program {i}: {err}\n{p}\n{e}"));
        assert_eq!(gs.node_count() as u64, n, "program {i}");
        finished += 1;
    }
    assert!(finished >= 285, "only {finished} of 300 finished");
}

#[test]
fn step_budget_and_depth_cap_abort() {
    let (p, e) = random_program(Limits::default(), &mut ChaCha8Rng::seed_from_u64(3));
    let mut sc = Supercompiler::new(&p, &e).step_budget(Some(1));
    let full = Supercompiler::new(&p, &e).count(&e).unwrap();
    if full > 1 {
        assert!(matches!(sc.run(&e), Err(mrsc::MrscError::StepBudget(1))));
    }
    let kmp = mrsc::corpus::KMP.load();
    let r = Supercompiler::new(&kmp.0, &kmp.1).max_depth(Some(3)).run(&kmp.1);
    assert!(matches!(r, Err(mrsc::MrscError::DepthCap(3))));
}
