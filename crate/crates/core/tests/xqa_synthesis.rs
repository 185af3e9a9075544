mod common;

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use lowres_mt::io::read_jsonl;
use lowres_mt::xqa::{build_xqa_dataset, GenerationClient, GenerationError, GenerationParams, HttpClient, MockClient, RetryPolicy, XqaConfig};
use lowres_mt::{LanguageRegistry, ParallelRecord, SftRecord};

use common::fixture;

#[test]
fn planted_faults_are_skipped() {
    let pairs: Vec<ParallelRecord> = read_jsonl(&fixture("xqa_pairs_100.jsonl")).unwrap();
    let client = MockClient::load(&fixture("xqa_mock.jsonl")).unwrap();
    let want: Vec<SftRecord> = read_jsonl(&fixture("xqa_expected.jsonl")).unwrap();
    let reg = LanguageRegistry::bundled();
    for concurrency in [1, 8] {
        let cfg = XqaConfig {
            concurrency,
            ..XqaConfig::default()
        };
        let (records, manifest) = build_xqa_dataset(&pairs, &client, &cfg, &reg).unwrap();
        assert_eq!(records.len(), 93);
        assert_eq!(manifest.skipped.values().sum::<u64>(), 7);
        assert_eq!(records, want);
        for r in &records {
            assert!(!r.instruction.contains('\n'));
            let lang = reg.name(r.pair.as_deref().unwrap().split_once('-').unwrap().1).unwrap();
            assert!(r.instruction.ends_with(&format!(" Answer in {lang}.")));
        }
    }
}

/// Minimal HTTP/1.1 server answering each request with the next canned
/// `(status, body)`; records the request bodies.
fn serve(responses: Vec<(u16, &'static str)>) -> (String, Arc<std::sync::Mutex<Vec<String>>>, Arc<AtomicUsize>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/generate", listener.local_addr().unwrap());
    let seen = Arc::new(std::sync::Mutex::new(Vec::new()));
    let hits = Arc::new(AtomicUsize::new(0));
    let (seen2, hits2) = (seen.clone(), hits.clone());
    std::thread::spawn(move || {
        for (stream, (status, body)) in listener.incoming().zip(responses) {
            let mut stream = stream.unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut len = 0;
            let mut auth = String::new();
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                let lower = line.to_ascii_lowercase();
                if let Some(v) = lower.strip_prefix("content-length:") {
                    len = v.trim().parse().unwrap();
                }
                if lower.starts_with("authorization:") {
                    auth = line.trim().to_string();
                }
                if line == "\r\n" || line.is_empty() {
                    break;
                }
            }
            let mut buf = vec![0; len];
            reader.read_exact(&mut buf).unwrap();
            seen2.lock().unwrap().push(format!("{auth}|{}", String::from_utf8(buf).unwrap()));
            hits2.fetch_add(1, Ordering::SeqCst);
            let reply = format!(
                "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            );
            stream.write_all(reply.as_bytes()).unwrap();
        }
    });
    (url, seen, hits)
}

fn fast_retry(max_retries: u32) -> RetryPolicy {
    RetryPolicy {
        max_retries,
        initial_backoff_ms: 1,
        max_backoff_ms: 2,
        timeout_ms: 5_000,
    }
}

#[test]
fn http_wire_contract() {
    let (url, seen, _) = serve(vec![(200, r#"{"text":"What is it?"}"#)]);
    let client = HttpClient::new(url, Some("secret".into()), fast_retry(0));
    let params = GenerationParams::default();
    assert_eq!(client.generate("hola", &params).unwrap(), "What is it?");
    let req = seen.lock().unwrap()[0].clone();
    let (auth, body) = req.split_once('|').unwrap();
    assert!(auth.eq_ignore_ascii_case("authorization: bearer secret"), "{auth}");
    let body: serde_json::Value = serde_json::from_str(body).unwrap();
    assert_eq!(body["prompt"], "hola");
    assert_eq!(body["max_tokens"], 128);
    assert_eq!(body["temperature"], 0.7);
    assert!(!client.describe().contains("secret"));
}

#[test]
fn http_retries_server_errors() {
    let (url, _, hits) = serve(vec![(503, "busy"), (429, "slow down"), (200, r#"{"text":"ok"}"#)]);
    let client = HttpClient::new(url, None, fast_retry(3));
    assert_eq!(client.generate("p", &GenerationParams::default()).unwrap(), "ok");
    assert_eq!(hits.load(Ordering::SeqCst), 3);
}

#[test]
fn http_client_errors_are_final() {
    let (url, _, hits) = serve(vec![(400, "bad"), (200, r#"{"text":"never"}"#)]);
    let client = HttpClient::new(url, None, fast_retry(3));
    let err = client.generate("p", &GenerationParams::default()).unwrap_err();
    assert!(matches!(err, GenerationError::Status { status: 400, .. }));
    assert_eq!(hits.load(Ordering::SeqCst), 1);
}

#[test]
fn http_gives_up_after_retries() {
    let (url, _, hits) = serve(vec![(500, "x"), (500, "x"), (500, "x")]);
    let client = HttpClient::new(url, None, fast_retry(2));
    assert!(client.generate("p", &GenerationParams::default()).is_err());
    assert_eq!(hits.load(Ordering::SeqCst), 3);
}

#[test]
fn http_malformed_body() {
    let (url, _, _) = serve(vec![(200, r#"{"nope":1}"#)]);
    let client = HttpClient::new(url, None, fast_retry(0));
    assert!(matches!(
        client.generate("p", &GenerationParams::default()),
        Err(GenerationError::Decode(_))
    ));
}
