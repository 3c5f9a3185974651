//! HTTP client for an external annealing service.
//!
//! Request body:
//!
//! ```text
//! {"num_spins": n, "couplings": [[i, j, J], ...], "fields": [[i, h], ...],
//!  "params": {"anneal_time": τ, "num_reads": count, "rescale_alpha": α}}
//! ```
//!
//! The response is a sample set, `{"n": n, "records": [[[s1, ..., sn], count], ...]}`.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::sample_set::SampleSet;
use crate::dynamics::IsingProblem;
use crate::error::{Error, Result};

/// Environment variable holding the service URL.
pub const ENDPOINT_ENV: &str = "ANNEAL_ENDPOINT";

const TIMEOUT: Duration = Duration::from_secs(120);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemoteParams {
    pub anneal_time: f64,
    pub num_reads: usize,
    pub rescale_alpha: f64,
}

#[derive(Serialize)]
struct Request<'a> {
    #[serde(flatten)]
    problem: &'a IsingProblem,
    params: &'a RemoteParams,
}

/// The explicit endpoint if given, else the value of `ANNEAL_ENDPOINT`.
pub fn resolve_endpoint(endpoint: Option<&str>) -> Result<String> {
    let url = match endpoint {
        Some(e) => e.to_owned(),
        None => std::env::var(ENDPOINT_ENV).unwrap_or_default(),
    };
    if url.trim().is_empty() {
        return Err(Error::Unreachable(format!(
            "no annealer endpoint configured; set {ENDPOINT_ENV} or pass an endpoint URL"
        )));
    }
    Ok(url)
}

/// Parse a response body into a sample set over `n` spins.
pub fn parse_response(body: &str, n: usize) -> Result<SampleSet> {
    let value: serde_json::Value =
        serde_json::from_str(body).map_err(|e| Error::MalformedResponse(format!("invalid JSON: {e}")))?;
    for key in ["n", "records"] {
        if value.get(key).is_none() {
            return Err(Error::MalformedResponse(format!("missing `{key}` key")));
        }
    }
    let samples: SampleSet = serde_json::from_value(value).map_err(|e| Error::MalformedResponse(e.to_string()))?;
    if samples.n() != n {
        return Err(Error::MalformedResponse(format!("expected {n} spins, response has {}", samples.n())));
    }
    Ok(samples)
}

/// POST `problem` to the service and parse the returned samples.
pub fn remote_submit(endpoint: Option<&str>, problem: &IsingProblem, params: &RemoteParams) -> Result<SampleSet> {
    let url = resolve_endpoint(endpoint)?;
    let agent: ureq::Agent =
        ureq::Agent::config_builder().http_status_as_error(false).timeout_global(Some(TIMEOUT)).build().into();
    let mut response = agent
        .post(&url)
        .send_json(Request { problem, params })
        .map_err(|e| Error::Unreachable(format!("{url}: {e}")))?;
    let status = response.status().as_u16();
    let body =
        response.body_mut().read_to_string().map_err(|e| Error::MalformedResponse(format!("unreadable body: {e}")))?;
    if !(200..300).contains(&status) {
        return Err(Error::RemoteRejected { status, message: body.trim().to_owned() });
    }
    parse_response(&body, problem.n())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Coupling;
    use std::io::{BufRead, BufReader, Read, Write};
    use std::net::TcpListener;
    use std::thread;

    /// One-shot HTTP server answering with `status` and `body`; returns its
    /// URL and a handle yielding the request body it saw.
    fn serve_once(status: &'static str, body: String) -> (String, thread::JoinHandle<String>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}/sample", listener.local_addr().unwrap());
        let handle = thread::spawn(move || {
            let (stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut length = 0usize;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                if line == "\r\n" || line.is_empty() {
                    break;
                }
                let lower = line.to_ascii_lowercase();
                if let Some(v) = lower.strip_prefix("content-length:") {
                    length = v.trim().parse().unwrap();
                }
            }
            let mut request = vec![0u8; length];
            reader.read_exact(&mut request).unwrap();
            let mut stream = stream;
            write!(
                stream,
                "HTTP/1.1 {status}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            )
            .unwrap();
            String::from_utf8(request).unwrap()
        });
        (url, handle)
    }

    fn problem() -> IsingProblem {
        IsingProblem::new(2, vec![Coupling { i: 0, j: 1, value: 0.5 }], vec![]).unwrap()
    }

    const PARAMS: RemoteParams = RemoteParams { anneal_time: 0.5, num_reads: 10, rescale_alpha: 6.0 };

    #[test]
    fn loopback_round_trip() {
        let fixture = SampleSet::from_index_counts(2, &[6, 0, 1, 3]);
        let (url, handle) = serve_once("200 OK", serde_json::to_string(&fixture).unwrap());
        let got = remote_submit(Some(&url), &problem(), &PARAMS).unwrap();
        assert_eq!(got, fixture);
        let request: serde_json::Value = serde_json::from_str(&handle.join().unwrap()).unwrap();
        assert_eq!(
            request,
            serde_json::json!({
                "num_spins": 2,
                "couplings": [[0, 1, 0.5]],
                "fields": [],
                "params": {"anneal_time": 0.5, "num_reads": 10, "rescale_alpha": 6.0}
            })
        );
    }

    #[test]
    fn rejected_with_message() {
        let (url, handle) = serve_once("422 Unprocessable Entity", "too many spins".into());
        let err = remote_submit(Some(&url), &problem(), &PARAMS).unwrap_err();
        handle.join().unwrap();
        match err {
            Error::RemoteRejected { status, message } => {
                assert_eq!(status, 422);
                assert_eq!(message, "too many spins");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_records_is_malformed() {
        let (url, handle) = serve_once("200 OK", r#"{"n": 2}"#.into());
        let err = remote_submit(Some(&url), &problem(), &PARAMS).unwrap_err();
        handle.join().unwrap();
        assert!(matches!(err, Error::MalformedResponse(_)), "{err:?}");
        assert!(matches!(parse_response("[1, 2", 2), Err(Error::MalformedResponse(_))));
        assert!(matches!(parse_response(r#"{"n":3,"records":[]}"#, 2), Err(Error::MalformedResponse(_))));
    }

    #[test]
    fn unset_endpoint_is_unreachable() {
        let err = resolve_endpoint(Some("  ")).unwrap_err();
        match err {
            Error::Unreachable(msg) => assert!(msg.contains(ENDPOINT_ENV)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn closed_port_is_unreachable() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}/", listener.local_addr().unwrap());
        drop(listener);
        assert!(matches!(remote_submit(Some(&url), &problem(), &PARAMS), Err(Error::Unreachable(_))));
    }
}
