//! Line-oriented consultation loop.

use std::io::{BufRead, Write};

use bayeslex::belief::Polarity;
use bayeslex::kb::KnowledgeBase;
use bayeslex::narrative::Narrator;
use bayeslex::session::{Consultant, Session};

use crate::error::CliError;

const HELP: &str =
    "commands: classes | start <class> | tests | assert <test> +|- | whatif <test> | recommend | undo | help | quit";

pub fn run(
    kb: &KnowledgeBase,
    narrator: Narrator<'_>,
    input: impl BufRead,
    mut out: impl Write,
) -> std::io::Result<()> {
    let consultant = Consultant::new(kb, narrator);
    let mut session: Option<Session> = None;
    writeln!(out, "{} ({HELP})", kb.domain_name)?;
    for line in input.lines() {
        let line = line?;
        let words: Vec<&str> = line.split_whitespace().collect();
        if words.first() == Some(&"quit") {
            break;
        }
        match step(&consultant, &mut session, &words) {
            Ok(text) if text.is_empty() => {}
            Ok(text) => writeln!(out, "{text}")?,
            Err(e) => writeln!(out, "error: {e}")?,
        }
    }
    Ok(())
}

fn active(session: &mut Option<Session>) -> Result<&mut Session, CliError> {
    session
        .as_mut()
        .ok_or_else(|| CliError::new("no_session", "no active session; use `start <class>`"))
}

fn usage(form: &str) -> CliError {
    CliError::new("usage", format!("usage: {form}"))
}

fn step(c: &Consultant<'_>, session: &mut Option<Session>, words: &[&str]) -> Result<String, CliError> {
    let lexicons = c.narrator().lexicons();
    let describe = |p| format!("{} ({})", p, lexicons.probability_term(p).phrase);
    match words {
        [] => Ok(String::new()),
        ["help"] => Ok(HELP.to_owned()),
        ["classes"] => Ok(c
            .kb()
            .classes
            .iter()
            .map(|k| format!("{:<20} {:<28} prior {}", k.id, k.display_name, describe(k.prior)))
            .collect::<Vec<_>>()
            .join("\n")),
        ["start", class] => {
            let s = c.create_session(class)?;
            let text = s.explanation();
            *session = Some(s);
            Ok(text)
        }
        ["start", ..] => Err(usage("start <class>")),
        ["tests"] => {
            let s = active(session)?;
            Ok(c.kb()
                .tests
                .iter()
                .map(|t| {
                    let status = if s.is_asserted(&t.id) {
                        "asserted"
                    } else if c.kb().covers(&t.id, s.class_id()) {
                        "available"
                    } else {
                        "not applicable"
                    };
                    format!("{:<16} {status}", t.id)
                })
                .collect::<Vec<_>>()
                .join("\n"))
        }
        ["assert", test, sign] => {
            let polarity: Polarity = sign.parse().map_err(|_| usage("assert <test> +|-"))?;
            let s = active(session)?;
            let outcome = c.assert_result(s, test, polarity)?;
            Ok(format!("{}\nbelief: {}", outcome.explanation, describe(outcome.belief)))
        }
        ["assert", ..] => Err(usage("assert <test> +|-")),
        ["whatif", test] => {
            let s = active(session)?;
            let w = c.what_if(s, test)?;
            let mut lines = vec![format!("P(positive) = {}", w.p_positive)];
            for (label, branch) in [("positive", &w.positive), ("negative", &w.negative)] {
                match branch {
                    Some(b) => lines.push(format!("if {label}: {}\n  {}", describe(b.posterior), b.explanation)),
                    None => lines.push(format!("if {label}: impossible under the model")),
                }
            }
            Ok(lines.join("\n"))
        }
        ["whatif", ..] => Err(usage("whatif <test>")),
        ["recommend"] => {
            let s = active(session)?;
            let r = c.recommend(s)?;
            Ok(r.ranked
                .iter()
                .enumerate()
                .map(|(i, t)| format!("{}. {:<16} expected gain {:.6} nats", i + 1, t.test_id, t.expected_gain))
                .collect::<Vec<_>>()
                .join("\n"))
        }
        ["undo"] => {
            let s = active(session)?;
            c.undo(s)?;
            Ok(format!("belief: {}", describe(s.belief())))
        }
        [other, ..] => Err(CliError::new("usage", format!("unknown command `{other}`; {HELP}"))),
    }
}
