//! Bundled fixtures: the lemonade fault-diagnosis scenario, the 9x9 learning
//! matrix trained for it, and the three-goal toy matrix used in the inference walkthrough.

use crate::model::KnowledgeBase;
use crate::scenario::Scenario;

pub const LEMONADE_SCENARIO: &str = include_str!("../fixtures/lemonade.json");
pub const APPENDIX_KB: &str = include_str!("../fixtures/appendix_kb.json");
pub const TOY_KB: &str = include_str!("../fixtures/toy_kb.json");

pub fn lemonade() -> Scenario {
    Scenario::from_json(LEMONADE_SCENARIO).expect("bundled scenario is valid")
}

pub fn appendix_kb() -> KnowledgeBase {
    KnowledgeBase::from_json(APPENDIX_KB).expect("bundled knowledge base is valid")
}

pub fn toy_kb() -> KnowledgeBase {
    KnowledgeBase::from_json(TOY_KB).expect("bundled knowledge base is valid")
}
