//! Parse a goal model, print its canonical form, and show how errors are reported.

use wfav::parser::{parse_goal_model, print_goal_model};

const MODEL: &str = r#"
actor M kind=agent
info I1 volatility=10 owner=M
goal G1 "run" actor=M
goal G2 "make" actor=M
goal G3 "use" actor=M
decompose G1 and G2 G3
produce G2 I1 check=B at=0
read G3 I1 type=R check=B purpose="use" at=2
"#;

fn main() {
    let parsed = parse_goal_model(MODEL, "inline.gqm").expect("valid model");
    print!("{}", print_goal_model(&parsed.value));

    match parse_goal_model("actor A kind=agent\nactor B kind=robot\nbogus G\n", "broken.gqm") {
        Ok(_) => unreachable!(),
        Err(diags) => diags.iter().for_each(|d| eprintln!("{d}")),
    }
}
