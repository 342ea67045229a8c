use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use csem_core::encoder::{remote_embed, EmbedEndpointConfig, RemoteInput};
use csem_core::CsemError;
use serde_json::{json, Value};

/// A tiny HTTP server answering every POST with `respond(body)`.
fn serve(respond: impl Fn(&Value) -> Value + Send + Sync + 'static) -> (String, Arc<AtomicUsize>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/embed", listener.local_addr().unwrap());
    let hits = Arc::new(AtomicUsize::new(0));
    let counter = hits.clone();
    let respond = Arc::new(respond);
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let respond = respond.clone();
            let counter = counter.clone();
            std::thread::spawn(move || {
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut len = 0usize;
                loop {
                    let mut line = String::new();
                    if reader.read_line(&mut line).unwrap() == 0 {
                        return;
                    }
                    let line = line.trim_end();
                    if line.is_empty() {
                        break;
                    }
                    if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                        len = v.trim().parse().unwrap();
                    }
                }
                let mut body = vec![0u8; len];
                reader.read_exact(&mut body).unwrap();
                counter.fetch_add(1, Ordering::SeqCst);
                let out = respond(&serde_json::from_slice(&body).unwrap()).to_string();
                let _ = write!(
                    stream,
                    "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{out}",
                    out.len()
                );
            });
        }
    });
    (url, hits)
}

/// Vector encoding the input text length, so order is checkable.
fn by_length(req: &Value) -> Value {
    let vectors: Vec<Value> = req["inputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|i| {
            let s = i.as_str().or_else(|| i["svg"].as_str()).unwrap();
            json!([s.len() as f64, 1.0, 0.0])
        })
        .collect();
    json!({ "vectors": vectors })
}

#[test]
fn batches_preserve_order() {
    let (url, hits) = serve(by_length);
    let cfg = EmbedEndpointConfig { batch_size: 2, concurrency: 3, ..EmbedEndpointConfig::new(url) };
    let inputs: Vec<RemoteInput> = (1..=7).map(|n| RemoteInput::Text("x".repeat(n))).collect();
    let out = remote_embed(&inputs, &cfg).unwrap();
    assert_eq!(out.len(), 7);
    assert_eq!(hits.load(Ordering::SeqCst), 4);
    for (n, v) in (1..=7).zip(&out) {
        let expect = n as f64 / ((n * n + 1) as f64).sqrt();
        assert!((v.values()[0] - expect).abs() < 1e-12);
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn svg_inputs_are_wrapped() {
    let (url, _) = serve(|req| {
        assert!(req["inputs"][0]["svg"].is_string());
        by_length(req)
    });
    let out = remote_embed(&[RemoteInput::Svg("<svg/>".into())], &EmbedEndpointConfig::new(url)).unwrap();
    assert_eq!(out[0].dim(), 3);
}

#[test]
fn wrong_dimension_rejected() {
    let (url, _) = serve(by_length);
    let cfg = EmbedEndpointConfig { expected_dim: Some(4), ..EmbedEndpointConfig::new(url) };
    let err = remote_embed(&[RemoteInput::Text("a".into())], &cfg).unwrap_err();
    assert!(matches!(err, CsemError::DimMismatch { expected: 4, actual: 3 }));
}

#[test]
fn wrong_count_rejected() {
    let (url, _) = serve(|_| json!({ "vectors": [[1.0, 0.0]] }));
    let inputs = vec![RemoteInput::Text("a".into()), RemoteInput::Text("b".into())];
    assert!(remote_embed(&inputs, &EmbedEndpointConfig::new(url)).is_err());
}

#[test]
fn unreachable_service_is_a_service_error() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/", listener.local_addr().unwrap());
    drop(listener);
    let err = remote_embed(&[RemoteInput::Text("a".into())], &EmbedEndpointConfig::new(url)).unwrap_err();
    assert!(matches!(err, CsemError::Service(_)));
    assert!(!err.is_validation());
}
