use std::time::Duration;

use serde_json::Value;

use crate::{CsemError, Result};

/// POST a JSON body and decode a JSON response, with a whole-request timeout.
pub(crate) fn post_json(url: &str, body: &Value, timeout: Duration) -> Result<Value> {
    let agent: ureq::Agent =
        ureq::Agent::config_builder().timeout_global(Some(timeout)).http_status_as_error(true).build().into();
    let mut resp = agent.post(url).send_json(body).map_err(|e| CsemError::Service(format!("POST {url}: {e}")))?;
    resp.body_mut().read_json::<Value>().map_err(|e| CsemError::Service(format!("decoding response from {url}: {e}")))
}
