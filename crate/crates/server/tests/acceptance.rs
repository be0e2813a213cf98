//! Acceptance criteria 1-9, one PASS/FAIL line each.
//!
//! The fixture corpus is loaded with the `oekg` binary into a data
//! directory, then served over HTTP by an in-process server; queries and
//! uploads go through the HTTP endpoints.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use oekg_core::engine::{Engine, EngineConfig};
use oekg_core::rdf::{parse_ntriples, serialize_ntriples, Iri};
use oekg_core::store::{NamedGraphId, QuadStore};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use reqwest::blocking::Client;
use reqwest::StatusCode;
use serde_json::Value;

const R: &str = "http://oekg.l3s.uni-hannover.de/resource/";
const UNER: &str = "http://oekg.l3s.uni-hannover.de/uner/";
const XSD_DATE: &str = "http://www.w3.org/2001/XMLSchema#date";
const SECOND: Duration = Duration::from_secs(1);

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

const QUERIES: [&str; 3] = ["earthquake_images", "wwe_question", "russian_view"];

fn query_file(name: &str) -> String {
    std::fs::read_to_string(fixtures().join(format!("{name}.rq"))).unwrap()
}

fn oekg(data_dir: &Path, args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_oekg"))
        .arg("--data-dir")
        .arg(data_dir)
        .args(args)
        .current_dir(fixtures())
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("oekg {args:?}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn load_corpus(data_dir: &Path) -> Result<(), String> {
    oekg(data_dir, &["load-schema", "uner_schema.nt", "--graph", "uner_schema"])?;
    oekg(data_dir, &["load-registry", "registry.tsv"])?;
    oekg(data_dir, &["upload", "eventkg_light.nt", "--graph", "eventkg_light"])?;
    for desc in ["uner_types.desc", "mlm.desc", "vquanda.desc", "news.desc", "clicks.desc"] {
        let report: Value = serde_json::from_str(&oekg(data_dir, &["ingest", desc])?).map_err(|e| e.to_string())?;
        if report["errors"].as_array().is_some_and(|e| !e.is_empty()) {
            return Err(format!("{desc}: {}", report["errors"]));
        }
    }
    Ok(())
}

/// Serves `engine` on an ephemeral port from a background runtime.
fn serve(engine: Arc<Engine>) -> String {
    let (tx, rx) = std::sync::mpsc::channel();
    std::thread::spawn(move || {
        let rt = tokio::runtime::Runtime::new().unwrap();
        rt.block_on(async move {
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
            tx.send(listener.local_addr().unwrap()).unwrap();
            axum::serve(listener, oekg_server::router(engine, 512 * 1024 * 1024)).await.unwrap();
        });
    });
    format!("http://{}", rx.recv().unwrap())
}

struct Api {
    base: String,
    client: Client,
}

impl Api {
    fn new(base: String) -> Self {
        Self { base, client: Client::builder().timeout(Duration::from_secs(300)).build().unwrap() }
    }

    fn query(&self, text: &str, accept: &str) -> Result<(String, Duration), String> {
        let start = Instant::now();
        let resp = self
            .client
            .post(format!("{}/api/query", self.base))
            .header("Accept", accept)
            .body(text.to_owned())
            .send()
            .map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        let status = resp.status();
        let body = resp.text().map_err(|e| e.to_string())?;
        if status != StatusCode::OK {
            return Err(format!("query returned {status}: {body}"));
        }
        Ok((body, elapsed))
    }

    fn upload(&self, graph: &str, body: String) -> Result<(StatusCode, Value), String> {
        let resp = self
            .client
            .post(format!("{}/api/uploadGraph?graph={graph}&mode=extend", self.base))
            .body(body)
            .send()
            .map_err(|e| e.to_string())?;
        let status = resp.status();
        Ok((status, resp.json().map_err(|e| e.to_string())?))
    }

    fn get(&self, path: &str) -> Result<(StatusCode, Value), String> {
        let resp = self.client.get(format!("{}{path}", self.base)).send().map_err(|e| e.to_string())?;
        let status = resp.status();
        Ok((status, resp.json().map_err(|e| e.to_string())?))
    }
}

fn date(d: &str) -> String {
    format!("\"{d}\"^^<{XSD_DATE}>")
}

fn criterion1(api: &Api) -> Outcome {
    let (body, elapsed) = api.query(&query_file("russian_view"), "text/tab-separated-values")?;
    let expected = format!(
        "?Label\t?StartDate\n\
         \"Brusilov Offensive\"@en\t{}\n\
         \"Russian Civil War\"@en\t{}\n\
         \"Treaty of Brest-Litovsk\"@en\t{}\n",
        date("1916-05-22"),
        date("1917-11-07"),
        date("1918-03-03")
    );
    ensure!(body == expected, "got:\n{body}");
    ensure!(elapsed < SECOND, "took {elapsed:?}");
    Ok(format!("3 rows in order, {elapsed:?}"))
}

fn criterion2(api: &Api) -> Outcome {
    let (body, elapsed) = api.query(&query_file("earthquake_images"), "text/tab-separated-values")?;
    let mut lines: Vec<&str> = body.lines().collect();
    ensure!(lines.first() == Some(&"?Location\t?Image"), "header {:?}", lines.first());
    let mut rows = lines.split_off(1);
    rows.sort();
    let img = "http://commons.wikimedia.org/wiki/Special:FilePath/";
    let expected = [
        ("place_ferrara", "Ferrara", "Castello_Estense_(Ferrara).jpg"),
        ("place_guaranda", "Guaranda", "Guaranda_Ecuador.jpg"),
        ("place_messina", "Messina", "Porto_di_Messina.jpg"),
    ];
    let want: Vec<String> = expected.iter().map(|(p, _, i)| format!("<{R}{p}>\t<{img}{i}>")).collect();
    ensure!(rows == want, "rows {rows:?}");
    for (place, label, _) in expected {
        let (labels, _) = api.query(
            &format!("SELECT ?l WHERE {{ <{R}{place}> skos:prefLabel ?l }}"),
            "text/tab-separated-values",
        )?;
        ensure!(labels == format!("?l\n\"{label}\"@en\n"), "label of {place}: {labels:?}");
    }
    ensure!(elapsed < SECOND, "took {elapsed:?}");
    Ok(format!("Ferrara, Messina, Guaranda with their images, {elapsed:?}"))
}

fn criterion3(api: &Api) -> Outcome {
    let (body, elapsed) = api.query(&query_file("wwe_question"), "application/json")?;
    let json: Value = serde_json::from_str(&body).map_err(|e| e.to_string())?;
    let rows = json["rows"].as_array().ok_or("no rows")?;
    let distinct: BTreeSet<Vec<String>> = rows
        .iter()
        .map(|r| r.as_array().unwrap()[..3].iter().map(|c| c.as_str().unwrap_or("").to_owned()).collect())
        .collect();
    let want = vec![
        "\"Whose wife is a presenter at WWE?\"@en".to_owned(),
        "\"The people whose partners are presenters at WWE are John Cena, Dwayne Johnson.\"@en".to_owned(),
        "\"¿Qué luchador tiene el mayor porcentaje de victorias en la historia de WWE?\"@es".to_owned(),
    ];
    ensure!(distinct.len() == 1 && distinct.contains(&want), "rows {distinct:?}");
    ensure!(elapsed < SECOND, "took {elapsed:?}");
    Ok(format!("{} rows (one per answer entity), one distinct question/answer/headline, {elapsed:?}", rows.len()))
}

fn criterion4(api: &Api) -> Outcome {
    let lookup = "/api/getId?language=en&value=Barack_Obama";
    let (status, id) = api.get(lookup)?;
    ensure!(status == StatusCode::OK, "getId returned {status}: {id}");
    let entity = id["iri"].as_str().ok_or("no iri")?.to_owned();
    let article = format!("{R}article1");
    let doc = format!(
        "<{article}> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://schema.org/Article> .\n\
         <{article}> <http://schema.org/mentions> <{entity}> .\n"
    );
    let (status, first) = api.upload("news", doc.clone())?;
    ensure!(status == StatusCode::OK && first["inserted"] == 2, "first upload {status}: {first}");
    let (_, stats) = api.get("/api/stats")?;
    ensure!(stats["graphs"]["news"] == 2, "stats {stats}");
    let (_, again) = api.upload("news", doc)?;
    ensure!(again["inserted"] == 0, "second upload {again}");
    let (_, id_after) = api.get(lookup)?;
    ensure!(id_after == id, "id changed: {id} then {id_after}");
    let (_, stats) = api.get("/api/stats")?;
    ensure!(stats["graphs"]["news"] == 2, "stats after repeat {stats}");
    Ok(format!("count(news) = 2, {} stable, repeat inserted 0", id["id"]))
}

fn criterion5() -> Outcome {
    // Triples per published data set and their published total.
    let table = [434_752_387u64, 118_662, 38_243, 942_753, 277_992, 70_754, 206_622];
    let sum: u64 = table.iter().sum();
    ensure!(sum == 436_407_413, "published counts sum to {sum}");

    let mut rng = StdRng::seed_from_u64(0x7ab1e1);
    let pool = common::Pool::new();
    let graphs: Vec<NamedGraphId> = ["eventkg", "click", "vquanda", "mlm", "news"]
        .iter()
        .map(|g| NamedGraphId::new(g).unwrap())
        .collect();
    let mut store = QuadStore::new();
    for op in 0..10_000 {
        let g = graphs.choose(&mut rng).unwrap();
        if rng.gen_bool(0.05) {
            store.delete_graph(g);
        } else {
            let batch: Vec<_> = (0..rng.gen_range(1..6)).map(|_| pool.triple(&mut rng)).collect();
            store.insert_quads(&batch, g);
        }
        let mut recount: BTreeMap<NamedGraphId, usize> = BTreeMap::new();
        for q in store.quads() {
            *recount.entry(q.graph).or_default() += 1;
        }
        let counts = store.graph_counts();
        let total: usize = recount.values().sum();
        ensure!(counts == recount, "op {op}: per-graph counters {counts:?} vs recount {recount:?}");
        ensure!(store.total() == total, "op {op}: total {} vs recount {total}", store.total());
    }
    Ok(format!("10000 operations, counters equal recount; published counts sum to {sum}"))
}

fn criterion6() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let triples: Vec<_> = (0..10_000).map(|_| common::random_triple(&mut rng)).collect();
    let (parsed, errors) = parse_ntriples(&serialize_ntriples(&triples));
    ensure!(errors.is_empty(), "{} parse errors, first {:?}", errors.len(), errors[0]);
    ensure!(parsed.len() == triples.len(), "{} triples back", parsed.len());
    let diffs = triples.iter().zip(&parsed).filter(|(a, b)| a != b).count();
    ensure!(diffs == 0, "{diffs} diffs");
    Ok("10000 triples, 0 diffs, 0 errors".into())
}

fn criterion7() -> Outcome {
    let pool = common::Pool::new();
    let mut rng = StdRng::seed_from_u64(0x0ac1e);
    let mut ordered = 0;
    for n in 0..1000 {
        let case = common::oracle::Case::random(&mut rng, &pool);
        ordered += usize::from(!case.order.is_empty());
        case.check().map_err(|e| format!("case {n}: {e}"))?;
    }
    Ok(format!("1000 cases agree ({ordered} with ORDER BY)"))
}

fn criterion8(api: &Api, engine: &Engine) -> Outcome {
    let u = |c: &str| Iri::new(format!("{UNER}{c}")).unwrap();
    let closure = engine.snapshot().schema().subclass_closure(&u("Earthquake")).map_err(|e| e.to_string())?;
    let want: BTreeSet<Iri> = ["Natural", "NaturalPhenomenon", "Event", "Name"].iter().map(|c| u(c)).collect();
    ensure!(closure == want, "closure {closure:?}");

    let (_, before) = api.get("/api/stats")?;
    let cyclic = format!(
        "<{UNER}Name> <http://www.w3.org/2000/01/rdf-schema#subClassOf> <{UNER}Earthquake> .\n\
         <{R}x> <http://www.w3.org/2000/01/rdf-schema#label> \"x\" .\n"
    );
    let (status, body) = api.upload("uner_schema", cyclic)?;
    ensure!(status == StatusCode::UNPROCESSABLE_ENTITY, "cyclic upload returned {status}: {body}");
    let (_, after) = api.get("/api/stats")?;
    ensure!(before == after, "stats changed: {before} -> {after}");
    let closure = engine.snapshot().schema().subclass_closure(&u("Earthquake")).map_err(|e| e.to_string())?;
    ensure!(closure == want, "closure changed after rejected upload");
    Ok("closure {Natural, NaturalPhenomenon, Event, Name}; cyclic upload rejected, store unchanged".into())
}

/// One million distinct quads shaped like the fixture corpus, split into
/// upload documents per graph.
fn synthetic(total: usize) -> Vec<(&'static str, String)> {
    let rdf_type = "<http://www.w3.org/1999/02/22-rdf-syntax-ns#type>";
    let label = "<http://www.w3.org/2004/02/skos/core#prefLabel>";
    let (so, sem, oekg_s) = ("http://schema.org/", "http://semanticweb.cs.vu.nl/2009/11/sem/", "http://oekg.l3s.uni-hannover.de/schema/");
    let mut rng = StdRng::seed_from_u64(1_000_000);
    let mut out: Vec<(&'static str, Vec<String>)> = Vec::new();
    let mut count = 0;
    let push = |graph: &'static str, line: String, out: &mut Vec<(&'static str, Vec<String>)>| {
        if out.last().is_none_or(|(g, lines)| *g != graph || lines.len() >= 100_000) {
            out.push((graph, Vec::new()));
        }
        out.last_mut().unwrap().1.push(line);
    };
    let (events, places, actors) = (100_000, 5_000, 20_000);
    let ev = |i: usize| format!("<{R}sev{i}>");
    // Event, place and actor descriptions.
    for i in 0..events {
        push("eventkg_light", format!("{} {rdf_type} <{sem}Event> .", ev(i)), &mut out);
        push("eventkg_light", format!("{} {label} \"Event {i}\"@en .", ev(i)), &mut out);
        let d = format!("{:04}-{:02}-{:02}", 1500 + i % 520, 1 + i % 12, 1 + i % 28);
        push("eventkg_light", format!("{} <{sem}hasBeginTimeStamp> {} .", ev(i), date(&d)), &mut out);
        push("eventkg_light", format!("{} <{sem}hasPlace> <{R}spl{}> .", ev(i), i % places), &mut out);
        count += 4;
    }
    for i in 0..events / 100 {
        push("uner", format!("{} {rdf_type} <{UNER}Earthquake> .", ev(i * 100)), &mut out);
        count += 1;
    }
    push("eventkg_light", format!("{} <http://www.w3.org/2002/07/owl#sameAs> <http://dbpedia.org/resource/World_War_I> .", ev(0)), &mut out);
    count += 1;
    for j in 0..places {
        push("mlm", format!("<{R}spl{j}> <{so}image> <http://commons.example.org/img{j}.jpg> .", ), &mut out);
        push("mlm", format!("<{R}spl{j}> <{so}description> \"Place {j}\"@en .", ), &mut out);
        count += 2;
    }
    // Questions about events with answers mentioning actors.
    let mut pairs = Vec::new();
    for k in 0..20_000 {
        let (q, a) = (format!("<{R}sq{k}>"), format!("<{R}sa{k}>"));
        let (e, actor) = (rng.gen_range(0..events), rng.gen_range(0..actors));
        pairs.push((e, actor));
        for line in [
            format!("{q} {rdf_type} <{so}Question> ."),
            format!("{q} <{so}text> \"Question {k}?\"@en ."),
            format!("{q} <{so}mainEntity> {} .", ev(e)),
            format!("{q} <{so}suggestedAnswer> {a} ."),
            format!("{a} {rdf_type} <{so}Answer> ."),
            format!("{a} <{so}text> \"Answer {k}.\"@en ."),
            format!("{a} <{so}mentions> <{R}sac{actor}> ."),
        ] {
            push("vquanda", line, &mut out);
        }
        count += 7;
    }
    // Language-specific relation scores, 100 relations per hub event.
    let langs = ["ru", "en", "de", "fr", "es", "it", "pt", "pl", "nl", "sv"];
    for k in 0..40_000 {
        let (r, s) = (format!("<{R}srel{k}>"), format!("<{R}srel{k}_s>"));
        let lang = langs.choose(&mut rng).unwrap();
        for line in [
            format!("{r} {rdf_type} <{oekg_s}LanguageSpecificRelation> ."),
            format!("{r} <{oekg_s}source> {} .", ev(k % 400)),
            format!("{r} <{oekg_s}target> {} .", ev(rng.gen_range(0..events))),
            format!("{r} <{oekg_s}hasLanguageSpecificRelationScore> {s} ."),
            format!("{s} <{oekg_s}scoreValue> \"{:.2}\"^^<http://www.w3.org/2001/XMLSchema#decimal> .", rng.gen_range(0.0..1.0)),
            format!("{s} <{oekg_s}scoreLanguage> \"{lang}\"^^<http://www.w3.org/2001/XMLSchema#language> ."),
        ] {
            push("eventkg_click", line, &mut out);
        }
        count += 6;
    }
    // News articles mentioning events and actors; every tenth one covers a
    // question's entity and its answer's entity.
    let mut a = 0;
    while count < total {
        let art = format!("<{R}sart{a}>");
        let (e, actor) = match pairs.get(a / 10) {
            Some(&pair) if a % 10 == 0 => pair,
            _ => (rng.gen_range(0..events), rng.gen_range(0..actors)),
        };
        let lines = [
            format!("{art} {rdf_type} <{so}Article> ."),
            format!("{art} <{so}headline> \"Headline {a}\"@en ."),
            format!("{art} <{so}mentions> {} .", ev(e)),
            format!("{art} <{so}mentions> <{R}sac{actor}> ."),
        ];
        for line in lines.into_iter().take(total - count) {
            push("news", line, &mut out);
            count += 1;
        }
        a += 1;
    }
    out.into_iter().map(|(g, lines)| (g, lines.join("\n") + "\n")).collect()
}

fn criterion9() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let engine = Arc::new(
        Engine::open(&EngineConfig { data_dir: Some(dir.path().into()), ..Default::default() })
            .map_err(|e| e.to_string())?,
    );
    let api = Api::new(serve(engine.clone()));
    let docs = synthetic(1_000_000);
    let (_, before) = api.get("/api/stats")?;
    let start = Instant::now();
    let mut inserted = 0;
    for (graph, body) in docs {
        let (status, report) = api.upload(graph, body)?;
        ensure!(status == StatusCode::OK, "upload {graph} returned {status}: {report}");
        ensure!(report["parse_errors"].as_array().is_some_and(|e| e.is_empty()), "parse errors in {graph}");
        inserted += report["inserted"].as_u64().unwrap_or(0);
    }
    let upload_time = start.elapsed();
    ensure!(inserted == 1_000_000, "inserted {inserted}");
    let (_, after) = api.get("/api/stats")?;
    let grown = after["total"].as_u64().unwrap() - before["total"].as_u64().unwrap();
    ensure!(grown == 1_000_000, "store grew by {grown}");
    ensure!(upload_time < Duration::from_secs(60), "upload took {upload_time:?}");

    let mut times = Vec::new();
    for name in QUERIES {
        let text = query_file(name);
        let plan = engine.explain(&text, None).map_err(|e| e.to_string())?;
        ensure!(!plan.uses_full_scan(), "{name} plan uses a full scan:\n{}", plan.render(None));
        let (body, elapsed) = api.query(&text, "text/tab-separated-values")?;
        ensure!(elapsed < SECOND, "{name} took {elapsed:?}");
        ensure!(body.lines().count() > 1, "{name} returned no rows");
        times.push(format!("{name} {} rows {elapsed:.0?}", body.lines().count() - 1));
    }
    Ok(format!("1000000 quads uploaded in {upload_time:.1?}; {}", times.join(", ")))
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let setup = load_corpus(dir.path());
    let (engine, api) = match &setup {
        Ok(()) => {
            let engine = Arc::new(
                Engine::open(&EngineConfig { data_dir: Some(dir.path().into()), ..Default::default() }).unwrap(),
            );
            let api = Api::new(serve(engine.clone()));
            (Some(engine), Some(api))
        }
        Err(e) => {
            eprintln!("corpus setup failed: {e}");
            (None, None)
        }
    };
    let needs_corpus = |f: &dyn Fn(&Api, &Engine) -> Outcome| -> Outcome {
        match (&api, &engine) {
            (Some(api), Some(engine)) => f(api, engine),
            _ => Err("fixture corpus unavailable".into()),
        }
    };
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("World War I sub-events with start dates", Box::new(|| needs_corpus(&|a, _| criterion1(a)))),
        ("earthquake locations with images", Box::new(|| needs_corpus(&|a, _| criterion2(a)))),
        ("WWE question with answer and headline", Box::new(|| needs_corpus(&|a, _| criterion3(a)))),
        ("link, create, upload end to end", Box::new(|| needs_corpus(&|a, _| criterion4(a)))),
        ("per-graph counter invariant", Box::new(criterion5)),
        ("N-Triples round trip", Box::new(criterion6)),
        ("query oracle", Box::new(criterion7)),
        ("UNER hierarchy", Box::new(|| needs_corpus(&criterion8))),
        ("desk-scale throughput", Box::new(criterion9)),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {} PASS  {name}: {detail} [{elapsed:.2?}]", n + 1),
            Err(reason) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: {reason} [{elapsed:.2?}]", n + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
