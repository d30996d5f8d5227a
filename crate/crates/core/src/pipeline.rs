//! Configuration, stage orchestration and the run manifest.
//!
//! Stages run in dependency order (ingest → netbuild → degstats, stance →
//! community → causal → report). Every artifact is a deterministic function
//! of the inputs, the configuration and the seed; wall times go to a
//! separate `timings.json` so the manifest itself stays reproducible.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::causal::{
    discover_parents, estimate_effects, residuals, scenario_series, threshold_links, write_causal_dot,
    write_effect_matrix, write_links, ActivitySeries, CoverageRule, DiscoveryConfig, Scenario, StdErrMethod, StlConfig,
    ThresholdConfig, BIN_SECONDS,
};
use crate::community::{
    detect, largest_component, log_grid, profile_communities, select_partition, to_undirected, write_edge_shares,
    write_partition, write_profiles, DetectConfig, Partition,
};
use crate::degstats::{
    pairwise_ks_heatmap, sample_group_degrees, write_heatmap_plot_data, write_p_matrix, write_sampled_degrees,
    DegreeDirection, SampleSize, SamplingPlan,
};
use crate::error::{Error, Result};
use crate::ingest::{
    load_categories, load_client_registry, load_corpus, load_statuses, AccountStatus, CategoryLookup, Corpus,
    NewsCategory, ObservationWindow, OfficialLookup, StatusLookup, Timestamp,
};
use crate::netbuild::{
    aggregate_ego, build_category_networks, build_expanded_ego, build_interaction_egos, summarize, suspended_nodes,
    top_active_breakdown, write_category_summary, write_edge_list, write_ego_summary, write_top_active,
    ActivityDirection, DirectedGraph, Interaction, SeedSet,
};
use crate::report::{report_category_shares, report_nonofficial_shares, report_original_shares, write_group_table};
use crate::rng::derive_seed;
use crate::stance::{
    class_by_status, classify_users, label_corpus, load_lexicon, score_users, write_class_by_status, write_stance_csv,
    ClassScheme, LexiconLabeler, StanceProfile, TweetLabel,
};

/// Environment variable consulted for the config path when `--config` is absent.
pub const CONFIG_ENV: &str = "INFOPS_CONFIG";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputConfig {
    /// Tweet dump (`.csv` or `.jsonl`). Relative paths resolve against the
    /// config file's directory.
    pub corpus: PathBuf,
    pub statuses: PathBuf,
    pub categories: PathBuf,
    pub clients: PathBuf,
    /// Seed hashtag lexicon; required by the stance stage.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lexicon: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_start: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_end: Option<String>,
}

impl Default for InputConfig {
    fn default() -> Self {
        Self {
            corpus: "tweets.csv".into(),
            statuses: "statuses.csv".into(),
            categories: "categories.csv".into(),
            clients: "clients.txt".into(),
            lexicon: None,
            window_start: None,
            window_end: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetbuildConfig {
    pub write_edge_lists: bool,
    /// Accounts ranked in the most-active breakdown.
    pub top_active: usize,
}

impl Default for NetbuildConfig {
    fn default() -> Self {
        Self {
            write_edge_lists: true,
            top_active: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DegstatsConfig {
    pub realizations: usize,
    /// Accounts per draw; 0 means "as many as the IRA accounts in that network".
    pub sample_size: usize,
    pub alpha: f64,
}

impl Default for DegstatsConfig {
    fn default() -> Self {
        Self {
            realizations: 1000,
            sample_size: 0,
            alpha: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StanceConfig {
    pub expand: bool,
    /// Co-occurrences with one camp's seeds needed to adopt its label.
    pub expansion_min_count: u32,
    pub scheme: ClassScheme,
}

impl Default for StanceConfig {
    fn default() -> Self {
        Self {
            expand: true,
            expansion_min_count: 10,
            scheme: ClassScheme::PerSide,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CommunityConfig {
    pub resolution_min: f64,
    pub resolution_max: f64,
    pub resolution_steps: usize,
    pub runs: usize,
    /// Smallest community, as a share of nodes, that gets a profile.
    pub min_share: f64,
}

impl Default for CommunityConfig {
    fn default() -> Self {
        Self {
            resolution_min: 0.2,
            resolution_max: 3.0,
            resolution_steps: 15,
            runs: 20,
            min_share: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StdErrChoice {
    #[default]
    Ols,
    Bootstrap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CausalConfig {
    pub tau_max: usize,
    pub alpha: f64,
    pub max_conds: usize,
    pub period: usize,
    pub coverage: f64,
    pub rule: CoverageRule,
    pub include_auto: bool,
    pub stderr: StdErrChoice,
    pub bootstrap_replicates: usize,
}

impl Default for CausalConfig {
    fn default() -> Self {
        Self {
            tau_max: 18,
            alpha: 0.05,
            max_conds: 3,
            period: 96,
            coverage: 0.75,
            rule: CoverageRule::SquaredShareNearest,
            include_auto: false,
            stderr: StdErrChoice::Ols,
            bootstrap_replicates: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub input: InputConfig,
    pub netbuild: NetbuildConfig,
    pub degstats: DegstatsConfig,
    pub stance: StanceConfig,
    pub community: CommunityConfig,
    pub causal: CausalConfig,
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::validation(format!("config: {e}")))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::validation(format!("config: {e}")))
    }

    /// Reads a config file; relative input paths will resolve against its directory.
    pub fn load(path: &Path) -> Result<LoadedConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let config = Self::from_toml(&text).map_err(|e| match e {
            Error::Validation(m) => Error::validation(format!("{}: {m}", path.display())),
            other => other,
        })?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(LoadedConfig { config, base_dir })
    }

    fn window(&self) -> Result<Option<ObservationWindow>> {
        let parse = |s: &Option<String>| s.as_deref().map(Timestamp::parse).transpose();
        match (parse(&self.input.window_start)?, parse(&self.input.window_end)?) {
            (None, None) => Ok(None),
            (start, end) => Ok(Some(ObservationWindow::new(
                start.unwrap_or(Timestamp(i64::MIN)),
                end.unwrap_or(Timestamp(i64::MAX)),
            )?)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub config: PipelineConfig,
    pub base_dir: PathBuf,
}

impl LoadedConfig {
    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Ingest,
    Netbuild,
    Degstats,
    Stance,
    Community,
    Causal,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 7] = [
        Stage::Ingest,
        Stage::Netbuild,
        Stage::Degstats,
        Stage::Stance,
        Stage::Community,
        Stage::Causal,
        Stage::Report,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Netbuild => "netbuild",
            Stage::Degstats => "degstats",
            Stage::Stance => "stance",
            Stage::Community => "community",
            Stage::Causal => "causal",
            Stage::Report => "report",
        }
    }

    fn requires(self) -> &'static [Stage] {
        match self {
            Stage::Ingest => &[],
            Stage::Netbuild | Stage::Stance | Stage::Report => &[Stage::Ingest],
            Stage::Degstats => &[Stage::Netbuild],
            Stage::Community => &[Stage::Netbuild, Stage::Stance],
            Stage::Causal => &[Stage::Stance],
        }
    }

    /// `targets` plus everything they depend on, in execution order.
    pub fn closure(targets: &[Stage]) -> Vec<Stage> {
        let mut need = [false; 7];
        let mut stack: Vec<Stage> = targets.to_vec();
        while let Some(s) = stack.pop() {
            if !need[s as usize] {
                need[s as usize] = true;
                stack.extend_from_slice(s.requires());
            }
        }
        Stage::ALL.into_iter().filter(|s| need[*s as usize]).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Provenance record written as `manifest.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config_sha256: String,
    pub stages: Vec<Stage>,
    pub inputs: BTreeMap<String, FileDigest>,
    pub seeds: BTreeMap<String, u64>,
    pub parameters: PipelineConfig,
    pub artifacts: Vec<FileDigest>,
    /// Wall times live in this file, next to the manifest.
    pub timings_file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageTiming {
    pub stage: Stage,
    pub seconds: f64,
}

fn sha256_file(path: &Path) -> Result<(String, u64)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::with_capacity(1 << 20, file);
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 20];
    let mut total = 0u64;
    loop {
        let n = reader.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
        total += n as u64;
    }
    Ok((hex::encode(hasher.finalize()), total))
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::validation(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn mkdir(path: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))?;
    Ok(path.to_path_buf())
}

/// Seeds derived from the run seed, one per randomized consumer.
pub fn stage_seeds(seed: u64) -> BTreeMap<String, u64> {
    ["degstats", "community", "causal_bootstrap"]
        .into_iter()
        .map(|k| (k.to_string(), derive_seed(seed, k)))
        .collect()
}

struct Context {
    corpus: Corpus,
    statuses: StatusLookup,
    categories: CategoryLookup,
    official: OfficialLookup,
    window: Option<ObservationWindow>,
    category_nets: Vec<DirectedGraph>,
    ira_aggregate: Option<DirectedGraph>,
    expanded: Option<DirectedGraph>,
    profiles: Option<Vec<StanceProfile>>,
}

/// Runs `targets` (and their prerequisites), writing artifacts plus
/// `manifest.json` and `timings.json` under `out_dir`.
pub fn run_pipeline(cfg: &LoadedConfig, targets: &[Stage], out_dir: &Path) -> Result<RunManifest> {
    let stages = Stage::closure(targets);
    mkdir(out_dir)?;
    let c = &cfg.config;
    let seeds = stage_seeds(c.seed);
    let mut timings = Vec::new();
    let mut ctx: Option<Context> = None;
    for &stage in &stages {
        let start = Instant::now();
        log::info!("stage {} starting", stage.as_str());
        let result = match stage {
            Stage::Ingest => ingest(cfg, out_dir).map(|c| ctx = Some(c)),
            other => {
                let ctx = ctx.as_mut().expect("ingest runs first");
                match other {
                    Stage::Netbuild => netbuild(c, ctx, out_dir),
                    Stage::Degstats => degstats(c, seeds["degstats"], ctx, out_dir),
                    Stage::Stance => stance(cfg, ctx, out_dir),
                    Stage::Community => community(c, seeds["community"], ctx, out_dir),
                    Stage::Causal => causal(c, seeds["causal_bootstrap"], ctx, out_dir),
                    Stage::Report => report(ctx, out_dir),
                    Stage::Ingest => unreachable!(),
                }
            }
        };
        result.map_err(|e| e.in_stage(stage.as_str()))?;
        let seconds = start.elapsed().as_secs_f64();
        log::info!("stage {} finished in {seconds:.2}s", stage.as_str());
        timings.push(StageTiming { stage, seconds });
    }

    let mut inputs = BTreeMap::new();
    let mut files: Vec<(&str, &PathBuf)> = vec![
        ("corpus", &c.input.corpus),
        ("statuses", &c.input.statuses),
        ("categories", &c.input.categories),
        ("clients", &c.input.clients),
    ];
    if let Some(l) = &c.input.lexicon {
        files.push(("lexicon", l));
    }
    for (role, p) in files {
        let (sha256, bytes) = sha256_file(&cfg.resolve(p))?;
        inputs.insert(
            role.to_string(),
            FileDigest {
                path: p.display().to_string(),
                sha256,
                bytes,
            },
        );
    }
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_sha256: hex::encode(Sha256::digest(c.to_toml()?.as_bytes())),
        stages,
        inputs,
        seeds,
        parameters: c.clone(),
        artifacts: artifact_digests(out_dir)?,
        timings_file: "timings.json".into(),
    };
    write_json(&manifest, &out_dir.join("manifest.json"))?;
    write_json(&timings, &out_dir.join("timings.json"))?;
    Ok(manifest)
}

fn artifact_digests(out_dir: &Path) -> Result<Vec<FileDigest>> {
    let mut found = Vec::new();
    let mut stack = vec![out_dir.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).map_err(|e| Error::io(&dir, e))? {
            let path = entry.map_err(|e| Error::io(&dir, e))?.path();
            if path.is_dir() {
                stack.push(path);
                continue;
            }
            let rel = path
                .strip_prefix(out_dir)
                .expect("walked from out_dir")
                .components()
                .map(|c| c.as_os_str().to_string_lossy().into_owned())
                .collect::<Vec<_>>()
                .join("/");
            if rel == "manifest.json" || rel == "timings.json" {
                continue;
            }
            let (sha256, bytes) = sha256_file(&path)?;
            found.push(FileDigest {
                path: rel,
                sha256,
                bytes,
            });
        }
    }
    found.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(found)
}

#[derive(Serialize)]
struct IngestSummary<'a> {
    records: usize,
    users: usize,
    load: &'a crate::ingest::LoadReport,
    accounts_by_status: BTreeMap<&'static str, usize>,
    unlabeled_accounts: usize,
    categorized_tweets: usize,
    window_start: Option<String>,
    window_end: Option<String>,
}

fn ingest(cfg: &LoadedConfig, out_dir: &Path) -> Result<Context> {
    let c = &cfg.config;
    let window = c.window()?;
    let corpus = load_corpus(
        &cfg.resolve(&c.input.corpus),
        window.unwrap_or_else(ObservationWindow::unbounded),
    )?;
    let statuses = load_statuses(&cfg.resolve(&c.input.statuses))?.resolve(corpus.users());
    let categories = load_categories(&cfg.resolve(&c.input.categories))?.resolve(corpus.symbols());
    let registry = load_client_registry(&cfg.resolve(&c.input.clients))?;
    let official = OfficialLookup::new(&registry, corpus.symbols());
    let dir = mkdir(&out_dir.join("ingest"))?;
    let mut by_status = BTreeMap::new();
    for s in AccountStatus::ALL {
        by_status.insert(s.as_str(), statuses.0.iter().filter(|x| **x == Some(s)).count());
    }
    let summary = IngestSummary {
        records: corpus.len(),
        users: corpus.num_users(),
        load: corpus.report(),
        accounts_by_status: by_status,
        unlabeled_accounts: statuses.0.iter().filter(|x| x.is_none()).count(),
        categorized_tweets: corpus.records().iter().filter(|r| categories.tag(r).is_some()).count(),
        window_start: window.map(|w| w.start.to_rfc3339()),
        window_end: window.map(|w| w.end.to_rfc3339()),
    };
    write_json(&summary, &dir.join("summary.json"))?;
    Ok(Context {
        corpus,
        statuses,
        categories,
        official,
        window,
        category_nets: Vec::new(),
        ira_aggregate: None,
        expanded: None,
        profiles: None,
    })
}

fn netbuild(c: &PipelineConfig, ctx: &mut Context, out_dir: &Path) -> Result<()> {
    let dir = mkdir(&out_dir.join("nets"))?;
    let nets = build_category_networks(&ctx.corpus, &ctx.statuses, &ctx.categories);
    let rows: Vec<(NewsCategory, _)> = NewsCategory::ALL
        .iter()
        .zip(&nets)
        .map(|(&k, g)| (k, summarize(g)))
        .collect();
    write_category_summary(&rows, &dir.join("category_summary.csv"))?;

    let ira = SeedSet::with_status(&ctx.statuses, AccountStatus::Ira);
    if ira.is_empty() {
        return Err(Error::validation(
            "no IRA accounts in the corpus; ego networks need a seed set",
        ));
    }
    let layers = build_interaction_egos(&ctx.corpus, &ctx.statuses, &ira)?;
    let refs: Vec<&DirectedGraph> = layers.iter().collect();
    let aggregate = aggregate_ego(&refs);
    let suspended = suspended_nodes(&aggregate);
    let (expanded, expanded_layers) = build_expanded_ego(&ctx.corpus, &ctx.statuses, &ira, &suspended)?;

    let mut ego_rows: Vec<(String, _)> = Interaction::ALL
        .iter()
        .zip(&layers)
        .map(|(i, g)| (i.as_str().to_string(), summarize(g)))
        .collect();
    ego_rows.push(("aggregated".into(), summarize(&aggregate)));
    ego_rows.extend(
        Interaction::ALL
            .iter()
            .zip(&expanded_layers)
            .map(|(i, g)| (format!("expanded_{}", i.as_str()), summarize(g))),
    );
    ego_rows.push(("expanded".into(), summarize(&expanded)));
    write_ego_summary(&ego_rows, &dir.join("ego_summary.csv"))?;

    let mut top = Vec::new();
    for (i, g) in Interaction::ALL.iter().zip(&layers) {
        for d in [ActivityDirection::Out, ActivityDirection::In] {
            top.push((*i, d.as_str(), top_active_breakdown(g, &ira, d, c.netbuild.top_active)));
        }
    }
    write_top_active(&top, &dir.join("top_active.csv"))?;

    if c.netbuild.write_edge_lists {
        let edges = mkdir(&dir.join("edges"))?;
        for (k, g) in NewsCategory::ALL.iter().zip(&nets) {
            write_edge_list(g, &ctx.corpus, &edges.join(format!("category_{}.csv", k.as_str())))?;
        }
        for (i, g) in Interaction::ALL.iter().zip(&layers) {
            write_edge_list(g, &ctx.corpus, &edges.join(format!("ego_{}.csv", i.as_str())))?;
        }
        write_edge_list(&aggregate, &ctx.corpus, &edges.join("ego_aggregated.csv"))?;
        write_edge_list(&expanded, &ctx.corpus, &edges.join("ego_expanded.csv"))?;
    }
    ctx.category_nets = nets;
    ctx.ira_aggregate = Some(aggregate);
    ctx.expanded = Some(expanded);
    Ok(())
}

fn degstats(c: &PipelineConfig, seed: u64, ctx: &Context, out_dir: &Path) -> Result<()> {
    let dir = mkdir(&out_dir.join("degstats"))?;
    let plan = SamplingPlan {
        realizations: c.degstats.realizations,
        sample_size: match c.degstats.sample_size {
            0 => SampleSize::MatchIra,
            k => SampleSize::Fixed(k),
        },
        seed,
    };
    let labels: Vec<String> = NewsCategory::ALL.iter().map(|k| k.as_str().to_string()).collect();
    let graphs: Vec<(String, &DirectedGraph)> = labels.iter().cloned().zip(&ctx.category_nets).collect();
    let mut vectors = Vec::new();
    for direction in DegreeDirection::BOTH {
        for group in AccountStatus::ALL {
            vectors.push(sample_group_degrees(&graphs, group, direction, &plan)?);
        }
    }
    write_sampled_degrees(&vectors, &labels, &dir.join("sampled_degrees.csv"))?;
    for direction in DegreeDirection::BOTH {
        let h = pairwise_ks_heatmap(&vectors, direction, c.degstats.alpha)?;
        write_p_matrix(&h, &dir.join(format!("ks_p_{}.csv", direction.as_str())))?;
        write_heatmap_plot_data(&h, &dir.join(format!("ks_heatmap_{}.csv", direction.as_str())))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct StanceSummary<'a> {
    seed_hashtags: usize,
    lexicon_hashtags: usize,
    tweets: BTreeMap<&'static str, usize>,
    thresholds: &'a crate::stance::ClassThresholds,
}

fn stance(cfg: &LoadedConfig, ctx: &mut Context, out_dir: &Path) -> Result<()> {
    let c = &cfg.config;
    let path = c
        .input
        .lexicon
        .as_ref()
        .ok_or_else(|| Error::validation("stance classification needs `input.lexicon`"))?;
    let seeds = load_lexicon(&cfg.resolve(path))?;
    let lexicon = if c.stance.expand {
        seeds.expand(&ctx.corpus, c.stance.expansion_min_count)
    } else {
        seeds.clone()
    };
    let dir = mkdir(&out_dir.join("stance"))?;
    let mut text = String::from("hashtag,camp\n");
    for (tag, camp) in lexicon.entries() {
        text.push_str(&format!("{tag},{}\n", camp.as_str()));
    }
    let lex_path = dir.join("lexicon.csv");
    std::fs::write(&lex_path, text).map_err(|e| Error::io(&lex_path, e))?;

    let labels = label_corpus(&ctx.corpus, &LexiconLabeler::new(&lexicon, &ctx.corpus));
    let mut profiles = score_users(&ctx.corpus, &labels)?;
    let thresholds = classify_users(&mut profiles, c.stance.scheme);
    write_stance_csv(&profiles, &ctx.corpus, &dir.join("user_stance.csv"))?;
    write_class_by_status(
        &class_by_status(&profiles, &ctx.statuses),
        &dir.join("class_by_status.csv"),
    )?;
    let mut tweets = BTreeMap::new();
    for l in [TweetLabel::ProTrump, TweetLabel::ProClinton, TweetLabel::Neutral] {
        tweets.insert(l.as_str(), labels.iter().filter(|x| **x == l).count());
    }
    let summary = StanceSummary {
        seed_hashtags: seeds.len(),
        lexicon_hashtags: lexicon.len(),
        tweets,
        thresholds: &thresholds,
    };
    write_json(&summary, &dir.join("summary.json"))?;
    ctx.profiles = Some(profiles);
    Ok(())
}

fn write_sweep(partitions: &[Partition], selected: &Partition, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::validation(format!("{}: {e}", path.display())))?;
    w.write_record([
        "resolution",
        "communities",
        "quality",
        "modularity",
        "stability",
        "selected",
    ])?;
    for p in partitions {
        w.write_record([
            format!("{:.6}", p.resolution),
            p.num_communities.to_string(),
            format!("{:.6}", p.quality),
            format!("{:.6}", p.modularity),
            format!("{:.6}", p.stability),
            (std::ptr::eq(p, selected)).to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn community(c: &PipelineConfig, seed: u64, ctx: &Context, out_dir: &Path) -> Result<()> {
    let cc = &c.community;
    let detect_cfg = DetectConfig {
        resolutions: log_grid(cc.resolution_min, cc.resolution_max, cc.resolution_steps),
        runs: cc.runs,
        seed,
    };
    let profiles = ctx.profiles.as_deref().expect("stance runs before community");
    let networks = [
        (
            "ira_ego",
            ctx.ira_aggregate.as_ref().expect("netbuild runs before community"),
        ),
        (
            "expanded_ego",
            ctx.expanded.as_ref().expect("netbuild runs before community"),
        ),
    ];
    for (name, directed) in networks {
        let dir = mkdir(&out_dir.join("community").join(name))?;
        let lcc = largest_component(&to_undirected(directed));
        let partitions = detect(&lcc, &detect_cfg)?;
        let chosen = select_partition(&partitions)?;
        write_sweep(&partitions, chosen, &dir.join("sweep.csv"))?;
        write_partition(chosen, &lcc, &ctx.corpus, &dir.join("partition.csv"))?;
        let profs = profile_communities(chosen, &lcc, directed, &ctx.statuses, profiles, cc.min_share)?;
        write_profiles(&profs, &dir.join("profiles.csv"))?;
        write_edge_shares(&profs, &dir.join("edge_shares.csv"))?;
    }
    Ok(())
}

/// The configured window, or the corpus time span aligned to bin edges.
fn causal_window(ctx: &Context) -> Result<ObservationWindow> {
    if let Some(w) = ctx.window {
        if w.start.0 != i64::MIN && w.end.0 != i64::MAX {
            return Ok(w);
        }
    }
    let times = ctx.corpus.records().iter().map(|r| r.timestamp.0);
    let (lo, hi) = times.fold((i64::MAX, i64::MIN), |(a, b), t| (a.min(t), b.max(t)));
    if lo > hi {
        return Err(Error::validation("empty corpus has no time span"));
    }
    let start = lo - lo.rem_euclid(BIN_SECONDS);
    ObservationWindow::new(Timestamp(start), Timestamp(hi))
}

fn write_series(series: &[ActivitySeries], window: &ObservationWindow, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::validation(format!("{}: {e}", path.display())))?;
    let mut header = vec!["bin".to_string(), "start".into()];
    header.extend(series.iter().map(|s| s.group.name().to_string()));
    w.write_record(&header)?;
    let n = series.first().map_or(0, |s| s.bins.len());
    for b in 0..n {
        let mut rec = vec![
            b.to_string(),
            Timestamp(window.start.0 + b as i64 * BIN_SECONDS).to_rfc3339(),
        ];
        rec.extend(series.iter().map(|s| s.bins[b].to_string()));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn causal(c: &PipelineConfig, seed: u64, ctx: &Context, out_dir: &Path) -> Result<()> {
    let cc = &c.causal;
    let profiles = ctx.profiles.as_deref().expect("stance runs before causal");
    let window = causal_window(ctx)?;
    let stl_cfg = StlConfig {
        period: cc.period,
        ..Default::default()
    };
    let discovery = DiscoveryConfig {
        tau_max: cc.tau_max,
        alpha: cc.alpha,
        max_conds: cc.max_conds,
    };
    let thresholds = ThresholdConfig {
        coverage: cc.coverage,
        rule: cc.rule,
        include_auto: cc.include_auto,
    };
    for scenario in [Scenario::Ira, Scenario::Suspended] {
        let dir = mkdir(&out_dir.join("causal").join(scenario.name()))?;
        let series = scenario_series(&ctx.corpus, &ctx.statuses, profiles, &ctx.official, &window, scenario)?;
        write_series(&series, &window, &dir.join("series.csv"))?;
        let resid = residuals(&series, &stl_cfg)?;
        let parents = discover_parents(&resid, &discovery)?;
        let stderr = match cc.stderr {
            StdErrChoice::Ols => StdErrMethod::Ols,
            StdErrChoice::Bootstrap => StdErrMethod::Bootstrap {
                replicates: cc.bootstrap_replicates,
                seed: derive_seed(seed, scenario.name()),
            },
        };
        let effects = estimate_effects(&resid, &parents, cc.tau_max, stderr)?;
        let selected = threshold_links(&effects, &thresholds)?;
        let groups = scenario.groups();
        let names: Vec<&str> = groups.iter().map(|g| g.name()).collect();
        let colors: Vec<&str> = groups.iter().map(|g| g.color()).collect();
        write_effect_matrix(&effects, &names, &dir.join("effects.csv"))?;
        write_links(&effects, &selected, &names, &dir.join("links.csv"))?;
        write_causal_dot(&effects, &selected, &names, &colors, &dir.join("network.dot"))?;
        let mut parent_rows = String::from("target,source,lag,min_abs_stat,p_value\n");
        for set in &parents {
            for p in &set.parents {
                parent_rows.push_str(&format!(
                    "{},{},{},{:.6},{:.6e}\n",
                    names[set.target], names[p.source], p.lag, p.min_abs_stat, p.p_value
                ));
            }
        }
        let path = dir.join("parents.csv");
        std::fs::write(&path, parent_rows).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

fn report(ctx: &Context, out_dir: &Path) -> Result<()> {
    let dir = mkdir(&out_dir.join("reports"))?;
    write_group_table(
        &report_category_shares(&ctx.corpus, &ctx.statuses, &ctx.categories),
        &dir.join("category_shares.csv"),
    )?;
    write_group_table(
        &report_nonofficial_shares(&ctx.corpus, &ctx.statuses, &ctx.official, &ctx.categories),
        &dir.join("nonofficial_shares.csv"),
    )?;
    write_group_table(
        &report_original_shares(&ctx.corpus, &ctx.statuses, &ctx.categories),
        &dir.join("original_shares.csv"),
    )?;
    Ok(())
}

/// Writes a config with every default spelled out, as a starting point.
pub fn write_default_config(path: &Path) -> Result<()> {
    let text = PipelineConfig::default().to_toml()?;
    let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}
