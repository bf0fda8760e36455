use nicheck::lang::{parse_program, pretty_print, random_cmd, Cmd, Level, Program, RandomSpec, SecEnv};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn env() -> SecEnv {
    [("l", Level::Lo), ("l2", Level::Lo), ("h", Level::Hi), ("h2", Level::Hi)].into_iter().collect()
}

fn program_from_seed(seed: u64, depth: usize) -> Program {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = RandomSpec::new(env().vars().map(String::from).collect(), depth);
    Program { sec_env: env(), body: random_cmd(&mut rng, &spec) }
}

proptest! {
    #[test]
    fn pretty_print_then_parse_is_identity(seed in any::<u64>(), depth in 1usize..8) {
        let p = program_from_seed(seed, depth);
        let text = pretty_print(&p);
        let q = parse_program(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(q, p);
    }

    #[test]
    fn printing_is_a_fixpoint(seed in any::<u64>()) {
        let text = pretty_print(&program_from_seed(seed, 6));
        prop_assert_eq!(pretty_print(&parse_program(&text).unwrap()), text);
    }
}

#[test]
fn associativity_survives_round_trip() {
    let a = || Cmd::assign("l", nicheck::lang::AExp::Const(0));
    for body in [Cmd::seq(Cmd::seq(a(), a()), a()), Cmd::seq(a(), Cmd::seq(a(), a())), Cmd::par(Cmd::seq(a(), a()), a())] {
        let p = Program { sec_env: env(), body };
        assert_eq!(parse_program(&pretty_print(&p)).unwrap(), p);
    }
}
