//! A public contribution goes through review without a server.

use chrono::Utc;
use geox::api::{ContributionQueue, ContributionState, Submission};
use geox::RecordKind;
use serde_json::json;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut store = geox::Store::new();
    let mut queue = ContributionQueue::default();

    let good = json!({
        "name": "Tick Habitat Maps",
        "providers": [{"name": "Some University", "category": "academic", "region": "europe"}],
        "cost": {"access": "free"},
        "coverage": {"region": "europe", "areas": ["UK"]},
        "health_applications": ["Lyme Disease"]
    });
    let id = queue.submit(Submission { kind: RecordKind::Dataset, payload: good, submitter: None }, Utc::now()).expect("payload is an object").id.clone();
    println!("{id} is {:?}; catalogue has {} datasets", queue.get(&id).unwrap().state, store.dataset_count());

    let record = queue.approve(&id, &mut store, Some("checked the licence".into()), Utc::now())?;
    println!("approved as {record}; catalogue has {} datasets", store.dataset_count());

    let bad = json!({"name": ""});
    let id = queue.submit(Submission { kind: RecordKind::Dataset, payload: bad, submitter: None }, Utc::now()).expect("payload is an object").id.clone();
    if let Err(e) = queue.approve(&id, &mut store, None, Utc::now()) {
        println!("cannot approve {id}: {e}");
    }
    queue.reject(&id, Some("incomplete".into()), Utc::now())?;
    println!("pending now: {}", queue.with_state(Some(ContributionState::Pending)).len());
    Ok(())
}
