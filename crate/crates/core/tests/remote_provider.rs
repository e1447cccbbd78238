use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use serde_json::{json, Value};
use styleplus::augment::{build_prompt, Provider, ProviderConfig, ProviderError, ProviderRequest, RemoteProvider};

#[derive(Clone)]
enum Reply {
    Json(u16, Value),
    Raw(u16, &'static str),
    Stall(Duration),
}

struct Recorded {
    authorization: Option<String>,
    body: Value,
}

/// Serves scripted replies, one connection per request, and records requests.
struct Server {
    url: String,
    requests: Arc<Mutex<Vec<Recorded>>>,
}

fn serve(script: Vec<Reply>) -> Server {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    let requests = Arc::new(Mutex::new(Vec::new()));
    let log = requests.clone();
    thread::spawn(move || {
        for reply in script {
            let Ok((stream, _)) = listener.accept() else { return };
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut length = 0;
            let mut authorization = None;
            loop {
                let mut line = String::new();
                if reader.read_line(&mut line).unwrap_or(0) == 0 || line == "\r\n" {
                    break;
                }
                let (name, value) = line.split_once(':').unwrap_or((&line, ""));
                match name.to_ascii_lowercase().as_str() {
                    "content-length" => length = value.trim().parse().unwrap(),
                    "authorization" => authorization = Some(value.trim().to_string()),
                    _ => {}
                }
            }
            let mut body = vec![0; length];
            reader.read_exact(&mut body).unwrap();
            log.lock().unwrap().push(Recorded {
                authorization,
                body: serde_json::from_slice(&body).unwrap_or(Value::Null),
            });
            let (status, text) = match reply {
                Reply::Json(s, v) => (s, v.to_string()),
                Reply::Raw(s, t) => (s, t.to_string()),
                Reply::Stall(d) => {
                    thread::sleep(d);
                    continue;
                }
            };
            let mut stream = stream;
            let _ = write!(
                stream,
                "HTTP/1.1 {status} Status\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{text}",
                text.len()
            );
        }
    });
    Server { url, requests }
}

fn config(url: &str) -> ProviderConfig {
    ProviderConfig {
        endpoint: url.to_string(),
        api_key: "test-key".into(),
        ..ProviderConfig::default()
    }
}

fn provider(cfg: ProviderConfig) -> RemoteProvider {
    RemoteProvider::with_timing(cfg, Duration::from_millis(500), Duration::from_millis(1))
}

fn call(p: &RemoteProvider) -> Result<styleplus::augment::LlmResponse, ProviderError> {
    let source = "class A {}\n";
    let prompt = build_prompt(source);
    p.complete(&ProviderRequest {
        file_name: "A.java",
        source,
        prompt: &prompt,
        cache_key: "k",
    })
}

fn openai(text: &str, finish: &str) -> Value {
    json!({
        "choices": [{"message": {"role": "assistant", "content": text}, "finish_reason": finish}],
        "usage": {"prompt_tokens": 4287, "completion_tokens": 12}
    })
}

#[test]
fn openai_success_and_request_shape() {
    let server = serve(vec![Reply::Json(
        200,
        openai("[Error](1) (2.1.1) (Class name 'A' x)", "stop"),
    )]);
    let r = call(&provider(config(&server.url))).unwrap();
    assert_eq!(r.raw_text, "[Error](1) (2.1.1) (Class name 'A' x)");
    assert_eq!((r.input_tokens, r.output_tokens, r.from_cache), (4287, 12, false));
    let reqs = server.requests.lock().unwrap();
    assert_eq!(reqs.len(), 1);
    assert_eq!(reqs[0].authorization.as_deref(), Some("Bearer test-key"));
    let body = &reqs[0].body;
    assert_eq!(body["temperature"], json!(1.0));
    assert!(body.get("model").is_none());
    assert!(body.get("thinking").is_none());
    assert!(body["messages"][0]["content"].as_str().unwrap().contains("class A {}"));
}

#[test]
fn optional_fields_are_sent_when_set() {
    let server = serve(vec![Reply::Json(200, openai("", "stop"))]);
    let cfg = ProviderConfig {
        model: Some("gemini-2.5-pro".into()),
        temperature: 0.2,
        max_tokens: Some(2048),
        thinking_tokens: Some(128),
        ..config(&server.url)
    };
    call(&provider(cfg)).unwrap();
    let body = &server.requests.lock().unwrap()[0].body;
    assert_eq!(body["model"], "gemini-2.5-pro");
    assert_eq!(body["temperature"], json!(0.2));
    assert_eq!(body["max_tokens"], 2048);
    assert_eq!(body["thinking"]["budget_tokens"], 128);
}

#[test]
fn gemini_body() {
    let body = json!({
        "candidates": [{"content": {"parts": [{"text": "[Warning](3) "}, {"text": "(2.5.1) (x)"}]}, "finishReason": "STOP"}],
        "usageMetadata": {"promptTokenCount": 100, "candidatesTokenCount": 20, "thoughtsTokenCount": 5}
    });
    let server = serve(vec![Reply::Json(200, body)]);
    let r = call(&provider(config(&server.url))).unwrap();
    assert_eq!(r.raw_text, "[Warning](3) (2.5.1) (x)");
    assert_eq!((r.input_tokens, r.output_tokens), (100, 25));
}

#[test]
fn server_errors_are_retried() {
    let server = serve(vec![
        Reply::Raw(500, "{}"),
        Reply::Raw(503, "{}"),
        Reply::Json(200, openai("ok", "stop")),
    ]);
    assert_eq!(call(&provider(config(&server.url))).unwrap().raw_text, "ok");
    assert_eq!(server.requests.lock().unwrap().len(), 3);
}

#[test]
fn rate_limit_exhausts_attempts() {
    let server = serve(vec![
        Reply::Raw(429, "{}"),
        Reply::Raw(429, "{}"),
        Reply::Raw(429, "{}"),
    ]);
    let err = call(&provider(config(&server.url))).unwrap_err();
    assert!(matches!(err, ProviderError::RateLimited(3)), "{err:?}");
    assert_eq!(server.requests.lock().unwrap().len(), 3);
}

#[test]
fn auth_failure_is_not_retried() {
    let server = serve(vec![Reply::Raw(401, "{\"error\":\"bad key\"}"), Reply::Raw(200, "{}")]);
    let err = call(&provider(config(&server.url))).unwrap_err();
    assert!(matches!(err, ProviderError::Auth(401)), "{err:?}");
    assert_eq!(server.requests.lock().unwrap().len(), 1);
}

#[test]
fn client_errors_are_not_retried() {
    let server = serve(vec![Reply::Raw(400, "bad request"), Reply::Raw(200, "{}")]);
    let err = call(&provider(config(&server.url))).unwrap_err();
    assert!(
        matches!(err, ProviderError::Http { status: 400, ref body } if body == "bad request"),
        "{err:?}"
    );
}

#[test]
fn truncation_is_reported_with_partial_text() {
    let server = serve(vec![Reply::Json(200, openai("[Error](1) (2.1.1) (cut", "length"))]);
    let err = call(&provider(config(&server.url))).unwrap_err();
    assert!(
        matches!(err, ProviderError::TruncatedOutput { ref partial } if partial.ends_with("(cut")),
        "{err:?}"
    );
    assert_eq!(server.requests.lock().unwrap().len(), 1);
}

#[test]
fn malformed_body() {
    let server = serve(vec![Reply::Raw(200, "not json")]);
    assert!(matches!(
        call(&provider(config(&server.url))),
        Err(ProviderError::MalformedResponse(_))
    ));
    let server = serve(vec![Reply::Json(200, json!({"id": 1}))]);
    assert!(matches!(
        call(&provider(config(&server.url))),
        Err(ProviderError::MalformedResponse(_))
    ));
}

#[test]
fn timeouts_are_retried_then_reported() {
    let stall = Reply::Stall(Duration::from_millis(1500));
    let server = serve(vec![stall.clone(), stall.clone(), stall]);
    let cfg = config(&server.url);
    let p = RemoteProvider::with_timing(cfg, Duration::from_millis(200), Duration::from_millis(1));
    let err = call(&p).unwrap_err();
    assert!(matches!(err, ProviderError::Timeout), "{err:?}");
}

#[test]
fn refused_connection_is_a_transport_error() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let cfg = config(&format!("http://127.0.0.1:{port}/v1"));
    assert!(matches!(call(&provider(cfg)), Err(ProviderError::Transport(_))));
}

#[test]
fn remote_check_populates_cache() {
    let answer = openai(
        "[Error](1) (2.1.1) (Class name 'Codechef' should be written in UpperCamelCase, for example 'CodeChef')",
        "stop",
    );
    let server = serve(vec![Reply::Json(200, answer)]);
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("Codechef.java");
    std::fs::write(&src, "class Codechef {\n}\n").unwrap();
    let cfg_path = dir.path().join("checks.xml");
    std::fs::write(
        &cfg_path,
        format!(
            r#"<module name="Checker"><module name="LlmStyleCheck">
<property name="endpoint" value="{}"/><property name="apiKey" value="k"/>
</module></module>"#,
            server.url
        ),
    )
    .unwrap();
    let run = || {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let args: Vec<std::ffi::OsString> = vec![
            "styleplus".into(),
            "check".into(),
            "--config".into(),
            cfg_path.clone().into(),
            src.clone().into(),
        ];
        let code = styleplus::cli::run(args, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap())
    };
    let (code, first) = run();
    assert_eq!(code, 1, "{first}");
    assert!(first.contains("Codechef.java:1:7: Class name 'Codechef'"), "{first}");
    let (_, second) = run();
    assert_eq!(first, second);
    assert_eq!(server.requests.lock().unwrap().len(), 1);
    assert!(dir.path().join(".styleplus-cache").is_dir());
}
