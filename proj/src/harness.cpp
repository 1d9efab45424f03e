#include "ssvep/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "ssvep/error.hpp"
#include "ssvep/fusion.hpp"
#include "ssvep/model_io.hpp"
#include "ssvep/reference.hpp"

namespace ssvep {

// ------------------------------------------------------------------ config

void RunConfig::validate() const {
  auto bad = [](const std::string& m) { throw Error("invalid-config", m); };
  if (dataset.empty() && !synth) bad("either dataset or synth must be given");
  if (windows.empty()) bad("at least one window length is required");
  for (double w : windows) {
    if (!(w > 0.0)) bad("window lengths must be positive");
  }
  if (n_harmonics < 1) bad("n_harmonics must be >= 1");
  if (members.empty()) bad("fusion needs at least one member");
  if (jobs < 1) bad("jobs must be >= 1");
  if (calibration_block < 0) bad("calibration_block must be >= 0");
  if (n_source_subjects < 0) bad("n_source_subjects must be >= 0");
  if (!(gaze_shift >= 0.0)) bad("gaze_shift must be >= 0");
  if (same.n_aug < 1) bad("same.n_aug must be >= 1");
  if (!(same.noise_level >= 0.0)) bad("same.noise_level must be >= 0");
  if (training.epochs < 1 || training.batch_size < 1 || !(training.learning_rate > 0.0)) {
    bad("training settings must be positive");
  }
}

namespace {

nlohmann::json filterbank_to_json(const FilterBankSpec& fb) {
  nlohmann::json bands = nlohmann::json::array();
  for (const auto& [lo, hi] : fb.bands) bands.push_back({lo, hi});
  return {{"bands", bands}, {"weights", fb.weights}, {"order", fb.order}};
}

FilterBankSpec filterbank_from_json(const nlohmann::json& j) {
  FilterBankSpec fb;
  for (const auto& b : j.at("bands")) fb.bands.emplace_back(b.at(0).get<double>(), b.at(1).get<double>());
  fb.weights = j.at("weights").get<std::vector<double>>();
  fb.order = j.value("order", kDefaultFilterOrder);
  return fb;
}

}  // namespace

nlohmann::json run_config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["dataset"] = c.dataset;
  if (c.synth) j["synth"] = synth_spec_to_json(*c.synth);
  j["windows"] = c.windows;
  j["n_harmonics"] = c.n_harmonics;
  if (c.filterbank) j["filterbank"] = filterbank_to_json(*c.filterbank);
  j["net"] = net_config_to_json(c.net);
  j["training"] = {{"epochs", c.training.epochs},
                   {"batch_size", c.training.batch_size},
                   {"learning_rate", c.training.learning_rate}};
  j["same"] = {{"n_aug", c.same.n_aug}, {"noise_level", c.same.noise_level}};
  j["tdca"] = {{"delays", c.tdca.delays},
               {"n_comp", c.tdca.n_comp},
               {"reference_projection", c.tdca.reference_projection}};
  j["members"] = c.members;
  j["seed"] = c.seed;
  j["out_dir"] = c.out_dir;
  j["jobs"] = c.jobs;
  j["calibration_block"] = c.calibration_block;
  j["gaze_shift"] = c.gaze_shift;
  j["n_source_subjects"] = c.n_source_subjects;
  j["targets"] = c.targets;
  return j;
}

RunConfig run_config_from_json(const nlohmann::json& j, RunConfig c) {
  try {
    c.dataset = j.value("dataset", c.dataset);
    if (j.contains("synth") && !j.at("synth").is_null()) {
      c.synth = synth_spec_from_json(j.at("synth"), c.synth.value_or(SynthSpec{}));
    }
    if (j.contains("windows")) {
      const auto& w = j.at("windows");
      c.windows = w.is_string() ? parse_windows(w.get<std::string>()) : w.get<std::vector<double>>();
    }
    c.n_harmonics = j.value("n_harmonics", c.n_harmonics);
    if (j.contains("filterbank") && !j.at("filterbank").is_null()) {
      c.filterbank = filterbank_from_json(j.at("filterbank"));
    }
    if (j.contains("net")) c.net = net_config_from_json(j.at("net"), c.net);
    if (j.contains("training")) {
      const auto& t = j.at("training");
      c.training.epochs = t.value("epochs", c.training.epochs);
      c.training.batch_size = t.value("batch_size", c.training.batch_size);
      c.training.learning_rate = t.value("learning_rate", c.training.learning_rate);
    }
    if (j.contains("same")) {
      c.same.n_aug = j.at("same").value("n_aug", c.same.n_aug);
      c.same.noise_level = j.at("same").value("noise_level", c.same.noise_level);
    }
    if (j.contains("tdca")) {
      const auto& t = j.at("tdca");
      c.tdca.delays = t.value("delays", c.tdca.delays);
      c.tdca.n_comp = t.value("n_comp", c.tdca.n_comp);
      c.tdca.reference_projection = t.value("reference_projection", c.tdca.reference_projection);
    }
    if (j.contains("members")) {
      const auto& m = j.at("members");
      c.members = m.is_string() ? parse_members(m.get<std::string>())
                                : m.get<std::vector<std::string>>();
    }
    c.seed = j.value("seed", c.seed);
    c.out_dir = j.value("out_dir", c.out_dir);
    c.jobs = j.value("jobs", c.jobs);
    c.calibration_block = j.value("calibration_block", c.calibration_block);
    c.gaze_shift = j.value("gaze_shift", c.gaze_shift);
    c.n_source_subjects = j.value("n_source_subjects", c.n_source_subjects);
    if (j.contains("targets")) c.targets = j.at("targets").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid-config", std::string("run config: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("missing-file", "cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid-config", path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

std::vector<double> parse_windows(const std::string& text) {
  auto num = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw Error("invalid-argument", "bad number '" + s + "' in window list '" + text + "'");
    }
  };
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw Error("invalid-argument", "window range must be start:stop:step");
    const double lo = num(parts[0]), hi = num(parts[1]), step = num(parts[2]);
    if (!(step > 0.0) || hi < lo) throw Error("invalid-argument", "empty window range '" + text + "'");
    // integer stepping avoids accumulating 0.1 rounding
    const long n = std::lround(std::floor((hi - lo) / step + 1e-9));
    for (long k = 0; k <= n; ++k) out.push_back(std::round((lo + k * step) * 1e9) / 1e9);
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) out.push_back(num(item));
    }
  }
  if (out.empty()) throw Error("invalid-argument", "no window lengths in '" + text + "'");
  for (double w : out) {
    if (!(w > 0.0)) throw Error("invalid-argument", "window lengths must be positive");
  }
  return out;
}

Dataset resolve_dataset(const RunConfig& cfg) {
  if (!cfg.dataset.empty()) return load_dataset(cfg.dataset);
  if (!cfg.synth) throw Error("invalid-config", "either dataset or synth must be given");
  return synth_generate(*cfg.synth, cfg.seed);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fold_seed(std::uint64_t seed, int fold_index) {
  return seed ^ static_cast<std::uint64_t>(fold_index);
}

// ---------------------------------------------------------------- pipeline

namespace {

bool has_member(const RunConfig& cfg, const std::string& m) {
  return std::find(cfg.members.begin(), cfg.members.end(), m) != cfg.members.end();
}

// Filter-bank decomposition of every full epoch, done once and shared by all
// folds; windows are cut afterwards so filter transients stay outside them.
struct Prepared {
  const Dataset* dataset = nullptr;
  FilterBankSpec filterbank;
  std::vector<BandStack> bands;                  // per epoch
  std::vector<std::vector<std::vector<int>>> index;  // [subject][block][stimulus] -> epoch
};

Prepared prepare(const RunConfig& cfg, const Dataset& ds) {
  const auto& m = ds.manifest;
  Prepared p;
  p.dataset = &ds;
  p.filterbank = cfg.filterbank ? *cfg.filterbank : default_filterbank(m.sampling_rate);
  validate_filterbank(p.filterbank, m.sampling_rate);
  if (m.n_subjects() < 2) {
    throw Error("insufficient-subjects", "leave-one-subject-out needs at least two subjects");
  }
  const int n_f = m.n_stimuli();
  p.index.assign(static_cast<std::size_t>(m.n_subjects()),
                 std::vector<std::vector<int>>(static_cast<std::size_t>(m.blocks_per_subject),
                                               std::vector<int>(static_cast<std::size_t>(n_f), -1)));
  for (std::size_t i = 0; i < ds.epochs.size(); ++i) {
    const auto& e = ds.epochs[i];
    if (e.subject < 0 || e.subject >= m.n_subjects() || e.block < 0 ||
        e.block >= m.blocks_per_subject || e.stimulus < 0 || e.stimulus >= n_f) {
      throw Error("invalid-config", "epoch outside the manifest's subject/block/stimulus grid");
    }
    p.index[static_cast<std::size_t>(e.subject)][static_cast<std::size_t>(e.block)]
           [static_cast<std::size_t>(e.stimulus)] = static_cast<int>(i);
  }
  if (cfg.calibration_block >= m.blocks_per_subject) {
    throw Error("missing-calibration-block",
                "calibration block " + std::to_string(cfg.calibration_block) + " does not exist");
  }
  for (int s = 0; s < m.n_subjects(); ++s) {
    for (int t = 0; t < n_f; ++t) {
      if (p.index[static_cast<std::size_t>(s)][static_cast<std::size_t>(cfg.calibration_block)]
                 [static_cast<std::size_t>(t)] < 0) {
        throw Error("missing-calibration-block", "subject " + m.subjects[static_cast<std::size_t>(s)].id +
                                                     " has no calibration trial for stimulus " +
                                                     std::to_string(t));
      }
    }
  }
  const FilterBank bank(p.filterbank, m.sampling_rate);
  p.bands.reserve(ds.epochs.size());
  for (const auto& e : ds.epochs) p.bands.push_back(bank.decompose(e.data));
  return p;
}

Eigen::Index analysis_start(const Prepared& p, const Epoch& e) {
  const auto& m = p.dataset->manifest;
  return e.onset + std::lround(m.latency_offset * m.sampling_rate);
}

BandStack cut_window(const Prepared& p, int epoch, int n_s) {
  const auto& e = p.dataset->epochs[static_cast<std::size_t>(epoch)];
  const Eigen::Index start = analysis_start(p, e);
  if (start < 0 || start + n_s > e.samples()) {
    throw Error("window-out-of-range", "window of " + std::to_string(n_s) +
                                           " samples does not fit the epoch");
  }
  BandStack out;
  for (const auto& b : p.bands[static_cast<std::size_t>(epoch)]) out.push_back(b.middleCols(start, n_s));
  return out;
}

int epoch_at(const Prepared& p, int subject, int block, int stimulus) {
  return p.index[static_cast<std::size_t>(subject)][static_cast<std::size_t>(block)]
                [static_cast<std::size_t>(stimulus)];
}

// One-shot calibration trials (one per stimulus) of a subject, windowed.
std::vector<BandStack> calibration_set(const Prepared& p, const RunConfig& cfg, int subject, int n_s) {
  std::vector<BandStack> out;
  for (int t = 0; t < p.dataset->manifest.n_stimuli(); ++t) {
    out.push_back(cut_window(p, epoch_at(p, subject, cfg.calibration_block, t), n_s));
  }
  return out;
}

// Per-stimulus transforms from the broadest band of the calibration trials.
std::vector<LstMatrix> subject_transforms(const std::vector<BandStack>& calib,
                                          std::span<const ReferenceTemplate> refs) {
  TrialsByClass trials(calib.size());
  for (std::size_t t = 0; t < calib.size(); ++t) trials[t].push_back(calib[t][0]);
  return estimate_stimulus_transforms(trials, refs);
}

NetSample make_sample(const BandStack& bands, std::span<const LstMatrix> transforms) {
  NetSample s;
  s.original = bands;
  s.mlst = mlst_transform(bands[0], transforms).transformed;
  return s;
}

NetConfig fold_net_config(const RunConfig& cfg, const DatasetManifest& m, int n_bands, int n_s,
                          std::uint64_t seed) {
  NetConfig nc = cfg.net;
  nc.n_f = m.n_stimuli();
  nc.n_c = m.n_channels();
  nc.n_h = cfg.n_harmonics;
  nc.n_s = n_s;
  nc.n_bands = n_bands;
  nc.seed = seed;
  return nc;
}

std::vector<int> source_pool(const RunConfig& cfg, int n_subjects, int target, std::uint64_t seed) {
  std::vector<int> pool;
  for (int s = 0; s < n_subjects; ++s) {
    if (s != target) pool.push_back(s);
  }
  if (cfg.n_source_subjects > 0 && cfg.n_source_subjects < static_cast<int>(pool.size())) {
    std::mt19937_64 rng(splitmix64(seed ^ 0x50757263ULL));
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(static_cast<std::size_t>(cfg.n_source_subjects));
    std::sort(pool.begin(), pool.end());
  }
  return pool;
}

struct SourceSet {
  std::vector<NetSample> samples;
  std::vector<int> labels;
  std::vector<int> subjects;
};

SourceSet build_sources(const Prepared& p, std::span<const int> pool,
                        std::span<const ReferenceTemplate> refs, int n_s) {
  const auto& m = p.dataset->manifest;
  SourceSet out;
  for (int s : pool) {
    // source transforms come from the class means over all of the subject's trials
    std::vector<BandStack> windows;
    std::vector<int> labels;
    TrialsByClass by_class(static_cast<std::size_t>(m.n_stimuli()));
    for (int b = 0; b < m.blocks_per_subject; ++b) {
      for (int t = 0; t < m.n_stimuli(); ++t) {
        const int e = epoch_at(p, s, b, t);
        if (e < 0) continue;
        windows.push_back(cut_window(p, e, n_s));
        labels.push_back(t);
        by_class[static_cast<std::size_t>(t)].push_back(windows.back()[0]);
      }
    }
    const auto transforms = estimate_stimulus_transforms(by_class, refs);
    for (std::size_t i = 0; i < windows.size(); ++i) {
      out.samples.push_back(make_sample(windows[i], transforms));
      out.labels.push_back(labels[i]);
      out.subjects.push_back(s);
    }
  }
  return out;
}

int window_length(const DatasetManifest& m, double window) {
  return window_samples(window, m.sampling_rate);
}

WindowResult run_window(const Prepared& p, const RunConfig& cfg, int target, std::span<const int> pool,
                        double window, std::uint64_t wseed) {
  const auto& m = p.dataset->manifest;
  const int n_f = m.n_stimuli();
  const int n_s = window_length(m, window);
  const auto refs = template_bank(m.stimuli, cfg.n_harmonics, m.sampling_rate, n_s);
  const auto& weights = p.filterbank.weights;
  const auto n_bands = static_cast<int>(p.filterbank.bands.size());

  WindowResult wr;
  wr.window = window;

  const bool use_net = has_member(cfg, "net");
  std::optional<NetParams> net;
  if (use_net) {
    SourceSet src = build_sources(p, pool, refs, n_s);
    // protocol hygiene: the target never reaches the training set
    for (int s : src.subjects) {
      if (s == target) throw Error("protocol-violation", "target subject present in training data");
    }
    TrainOptions to = cfg.training;
    to.seed = splitmix64(wseed ^ 2);
    auto tr = train(src.samples, src.labels,
                    fold_net_config(cfg, m, n_bands, n_s, splitmix64(wseed ^ 1)), to);
    wr.net_train_accuracy = 100.0 * tr.train_accuracy;
    wr.loss_history = std::move(tr.loss_history);
    net = std::move(tr.params);
  }

  // one-shot calibration of the target; SAME runs on the raw window and the
  // artificial trials are decomposed like real ones
  const auto calib = calibration_set(p, cfg, target, n_s);
  const auto transforms = subject_transforms(calib, refs);
  TrialsByClass raw(static_cast<std::size_t>(n_f));
  for (int t = 0; t < n_f; ++t) {
    const auto& e = p.dataset->epochs[static_cast<std::size_t>(epoch_at(p, target, cfg.calibration_block, t))];
    raw[static_cast<std::size_t>(t)].push_back(e.data.middleCols(analysis_start(p, e), n_s));
  }
  SameOptions so = cfg.same;
  so.seed = splitmix64(wseed ^ 3);
  const auto same = same_augment(raw, refs, so);
  const FilterBank bank(p.filterbank, m.sampling_rate);
  BandTrialsByClass augmented(static_cast<std::size_t>(n_f));
  for (int t = 0; t < n_f; ++t) {
    auto& cls = augmented[static_cast<std::size_t>(t)];
    cls.push_back(calib[static_cast<std::size_t>(t)]);
    for (const auto& a : same.artificial[static_cast<std::size_t>(t)]) cls.push_back(bank.decompose(a));
  }
  const TrcaModel trca = trca_train(augmented);
  const TdcaModel tdca = tdca_train(augmented, refs, cfg.tdca);

  FusionConfig fusion{cfg.members};
  std::map<std::string, int> member_correct;
  int correct = 0;
  for (int b = 0; b < m.blocks_per_subject; ++b) {
    if (b == cfg.calibration_block) continue;
    for (int t = 0; t < n_f; ++t) {
      const int e = epoch_at(p, target, b, t);
      if (e < 0) continue;
      const BandStack bands = cut_window(p, e, n_s);
      std::vector<ScoreVector> scores;
      if (net) scores.push_back({infer(*net, make_sample(bands, transforms)), "net"});
      scores.push_back(etrca_score(bands, trca, weights));
      scores.push_back(tdca_score(bands, tdca, weights));
      scores.push_back(fbcca_score(bands, refs, weights));
      const auto d = fuse_and_decide(scores, fusion);
      TrialPrediction tp;
      tp.block = b;
      tp.stimulus = t;
      tp.predicted = d.predicted;
      tp.fused = d.fused.scores;
      for (const auto& s : scores) {
        const int pred = s.argmax();
        tp.member_predictions[s.decoder] = pred;
        member_correct[s.decoder] += pred == t ? 1 : 0;
      }
      correct += d.predicted == t ? 1 : 0;
      wr.predictions.push_back(std::move(tp));
    }
  }
  if (wr.predictions.empty()) {
    throw Error("insufficient-trials", "no target trials outside the calibration block");
  }
  const double n = static_cast<double>(wr.predictions.size());
  wr.accuracy = 100.0 * correct / n;
  wr.itr = itr(n_f, correct / n, window + cfg.gaze_shift);
  for (const auto& [k, v] : member_correct) wr.member_accuracy[k] = 100.0 * v / n;
  return wr;
}

FoldResult run_fold(const Prepared& p, const RunConfig& cfg, int target) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& m = p.dataset->manifest;
  const std::uint64_t fseed = fold_seed(cfg.seed, target);
  const auto pool = source_pool(cfg, m.n_subjects(), target, fseed);
  FoldResult fr;
  fr.subject = m.subjects[static_cast<std::size_t>(target)].id;
  fr.subject_index = target;
  for (int s : pool) fr.sources.push_back(m.subjects[static_cast<std::size_t>(s)].id);
  for (std::size_t w = 0; w < cfg.windows.size(); ++w) {
    fr.windows.push_back(run_window(p, cfg, target, pool, cfg.windows[w],
                                    splitmix64(fseed + 0x100 * (w + 1))));
  }
  fr.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return fr;
}

std::vector<int> resolve_targets(const RunConfig& cfg, const DatasetManifest& m) {
  std::vector<int> out;
  if (cfg.targets.empty()) {
    out.resize(static_cast<std::size_t>(m.n_subjects()));
    std::iota(out.begin(), out.end(), 0);
    return out;
  }
  for (const auto& id : cfg.targets) {
    auto it = std::find_if(m.subjects.begin(), m.subjects.end(),
                           [&](const SubjectEntry& s) { return s.id == id; });
    if (it == m.subjects.end()) throw Error("invalid-config", "unknown target subject '" + id + "'");
    out.push_back(static_cast<int>(it - m.subjects.begin()));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<FoldResult>& folds) {
  std::vector<SummaryRow> rows;
  if (folds.empty()) return rows;
  for (std::size_t w = 0; w < folds.front().windows.size(); ++w) {
    SummaryRow r;
    r.window = folds.front().windows[w].window;
    std::vector<double> acc, it;
    std::map<std::string, std::vector<double>> mem;
    for (const auto& f : folds) {
      const auto& wr = f.windows.at(w);
      acc.push_back(wr.accuracy);
      it.push_back(wr.itr);
      for (const auto& [k, v] : wr.member_accuracy) mem[k].push_back(v);
    }
    r.accuracy = mean_and_se(acc);
    r.itr = mean_and_se(it);
    for (const auto& [k, v] : mem) r.members[k] = mean_and_se(v);
    rows.push_back(std::move(r));
  }
  return rows;
}

EvaluationResult loso_evaluate(const RunConfig& cfg, const Dataset& dataset) {
  cfg.validate();
  for (const auto& mem : cfg.members) parse_members(mem);
  const Prepared p = prepare(cfg, dataset);
  const auto& m = dataset.manifest;
  for (double w : cfg.windows) {
    if (window_length(m, w) < 2 * cfg.n_harmonics + 1) {
      throw Error("invalid-config", "window too short for the reference set");
    }
  }
  const auto targets = resolve_targets(cfg, m);

  std::vector<FoldResult> folds(targets.size());
  std::vector<std::exception_ptr> errors(targets.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < targets.size(); i = next++) {
      try {
        folds[i] = run_fold(p, cfg, targets[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(cfg.jobs), targets.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < n_threads; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  EvaluationResult r;
  r.config = cfg;
  r.n_classes = m.n_stimuli();
  r.folds = std::move(folds);
  r.summary = summarize(r.folds);
  return r;
}

EvaluationResult loso_evaluate(const RunConfig& cfg) {
  cfg.validate();
  return loso_evaluate(cfg, resolve_dataset(cfg));
}

TrainResult train_network(const RunConfig& cfg, const Dataset& dataset, double window, int exclude) {
  cfg.validate();
  const Prepared p = prepare(cfg, dataset);
  const auto& m = dataset.manifest;
  const int n_s = window_length(m, window);
  const auto refs = template_bank(m.stimuli, cfg.n_harmonics, m.sampling_rate, n_s);
  std::vector<int> pool;
  for (int s = 0; s < m.n_subjects(); ++s) {
    if (s != exclude) pool.push_back(s);
  }
  const SourceSet src = build_sources(p, pool, refs, n_s);
  TrainOptions to = cfg.training;
  to.seed = splitmix64(cfg.seed ^ 2);
  return train(src.samples, src.labels,
               fold_net_config(cfg, m, static_cast<int>(p.filterbank.bands.size()), n_s,
                               splitmix64(cfg.seed ^ 1)),
               to);
}

// ------------------------------------------------------------------ reports

namespace {

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string fmt_window(double w) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", w);
  return buf;
}

const char* kDecoders[] = {"net", "etrca", "tdca", "fbcca"};

nlohmann::json fold_to_json(const FoldResult& f) {
  nlohmann::json windows = nlohmann::json::array();
  for (const auto& w : f.windows) {
    nlohmann::json preds = nlohmann::json::array();
    for (const auto& p : w.predictions) {
      preds.push_back({{"block", p.block},
                       {"stimulus", p.stimulus},
                       {"predicted", p.predicted},
                       {"members", p.member_predictions},
                       {"fused", std::vector<double>(p.fused.data(), p.fused.data() + p.fused.size())}});
    }
    windows.push_back({{"window", w.window},
                       {"accuracy", w.accuracy},
                       {"itr", w.itr},
                       {"member_accuracy", w.member_accuracy},
                       {"net_train_accuracy", w.net_train_accuracy},
                       {"loss_history", w.loss_history},
                       {"predictions", preds}});
  }
  return {{"subject", f.subject},
          {"subject_index", f.subject_index},
          {"sources", f.sources},
          {"seconds", f.seconds},
          {"windows", windows}};
}

FoldResult fold_from_json(const nlohmann::json& j) {
  FoldResult f;
  f.subject = j.at("subject").get<std::string>();
  f.subject_index = j.at("subject_index").get<int>();
  f.sources = j.at("sources").get<std::vector<std::string>>();
  f.seconds = j.value("seconds", 0.0);
  for (const auto& wj : j.at("windows")) {
    WindowResult w;
    w.window = wj.at("window").get<double>();
    w.accuracy = wj.at("accuracy").get<double>();
    w.itr = wj.at("itr").get<double>();
    w.member_accuracy = wj.at("member_accuracy").get<std::map<std::string, double>>();
    w.net_train_accuracy = wj.value("net_train_accuracy", -1.0);
    w.loss_history = wj.value("loss_history", std::vector<double>{});
    for (const auto& pj : wj.at("predictions")) {
      TrialPrediction p;
      p.block = pj.at("block").get<int>();
      p.stimulus = pj.at("stimulus").get<int>();
      p.predicted = pj.at("predicted").get<int>();
      p.member_predictions = pj.at("members").get<std::map<std::string, int>>();
      const auto fused = pj.at("fused").get<std::vector<double>>();
      p.fused = Eigen::Map<const Vector>(fused.data(), static_cast<Eigen::Index>(fused.size()));
      w.predictions.push_back(std::move(p));
    }
    f.windows.push_back(std::move(w));
  }
  return f;
}

}  // namespace

void report_emit(const EvaluationResult& result, const std::filesystem::path& out_dir) {
  if (result.folds.empty()) throw Error("io-failure", "nothing to report: no folds");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error("io-failure", "cannot create " + out_dir.string() + ": " + ec.message());

  std::ostringstream folds;
  folds << "subject,window,accuracy,itr\n";
  for (const auto& f : result.folds) {
    for (const auto& w : f.windows) {
      folds << f.subject << ',' << fmt_window(w.window) << ',' << fmt(w.accuracy) << ','
            << fmt(w.itr) << '\n';
    }
  }
  write_text_file(out_dir / "folds.csv", folds.str());

  std::ostringstream summary;
  summary << "window,n,accuracy_mean,accuracy_se,itr_mean,itr_se";
  for (const char* d : kDecoders) summary << ',' << d << "_mean," << d << "_se";
  summary << '\n';
  for (const auto& r : result.summary) {
    summary << fmt_window(r.window) << ',' << r.accuracy.n << ',' << fmt(r.accuracy.mean, 6) << ','
            << fmt(r.accuracy.se, 6) << ',' << fmt(r.itr.mean, 6) << ',' << fmt(r.itr.se, 6);
    for (const char* d : kDecoders) {
      auto it = r.members.find(d);
      if (it == r.members.end()) {
        summary << ",,";
      } else {
        summary << ',' << fmt(it->second.mean, 6) << ',' << fmt(it->second.se, 6);
      }
    }
    summary << '\n';
  }
  write_text_file(out_dir / "summary.csv", summary.str());

  write_text_file(out_dir / "config.json", run_config_to_json(result.config).dump(2) + "\n");

  // methods as rows, window lengths as columns; mean +/- standard error
  std::ostringstream table;
  auto header = [&](const std::string& title) {
    table << title << '\n';
    char buf[32];
    std::snprintf(buf, sizeof buf, "%-10s", "method");
    table << buf;
    for (const auto& r : result.summary) {
      std::snprintf(buf, sizeof buf, " %16s", (fmt_window(r.window) + " s").c_str());
      table << buf;
    }
    table << '\n';
  };
  auto row = [&](const std::string& name, auto get) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-10s", name.c_str());
    table << buf;
    for (const auto& r : result.summary) {
      const std::optional<MeanSe> v = get(r);
      const std::string cell = v ? fmt(v->mean, 2) + " +/- " + fmt(v->se, 2) : "-";
      std::snprintf(buf, sizeof buf, " %16s", cell.c_str());
      table << buf;
    }
    table << '\n';
  };
  header("Accuracy (%)");
  row("fusion", [](const SummaryRow& r) { return std::optional<MeanSe>(r.accuracy); });
  for (const char* d : kDecoders) {
    row(d, [d](const SummaryRow& r) {
      auto it = r.members.find(d);
      return it == r.members.end() ? std::optional<MeanSe>() : std::optional<MeanSe>(it->second);
    });
  }
  table << '\n';
  header("ITR (bits/min)");
  row("fusion", [](const SummaryRow& r) { return std::optional<MeanSe>(r.itr); });
  table << "\nmembers: ";
  for (std::size_t i = 0; i < result.config.members.size(); ++i) {
    table << (i ? "," : "") << result.config.members[i];
  }
  table << "  subjects: " << result.folds.size() << "  classes: " << result.n_classes << '\n';
  write_text_file(out_dir / "table.txt", table.str());

  std::ostringstream preds;
  preds << "subject,window,block,stimulus,predicted";
  for (const char* d : kDecoders) preds << ',' << d;
  preds << ",fused\n";
  for (const auto& f : result.folds) {
    for (const auto& w : f.windows) {
      for (const auto& p : w.predictions) {
        preds << f.subject << ',' << fmt_window(w.window) << ',' << p.block << ',' << p.stimulus << ','
              << p.predicted;
        for (const char* d : kDecoders) {
          auto it = p.member_predictions.find(d);
          preds << ',';
          if (it != p.member_predictions.end()) preds << it->second;
        }
        preds << ',';
        for (Eigen::Index k = 0; k < p.fused.size(); ++k) preds << (k ? ";" : "") << fmt(p.fused[k], 6);
        preds << '\n';
      }
    }
  }
  write_text_file(out_dir / "predictions.csv", preds.str());

  nlohmann::json j;
  j["config"] = run_config_to_json(result.config);
  j["n_classes"] = result.n_classes;
  nlohmann::json folds_json = nlohmann::json::array();
  for (const auto& f : result.folds) folds_json.push_back(fold_to_json(f));
  j["folds"] = folds_json;
  write_text_file(out_dir / "results.json", j.dump(1) + "\n");
}

EvaluationResult load_results(const std::filesystem::path& results_json) {
  std::ifstream in(results_json);
  if (!in) throw Error("missing-file", "cannot open " + results_json.string());
  EvaluationResult r;
  try {
    nlohmann::json j;
    in >> j;
    r.config = run_config_from_json(j.at("config"));
    r.n_classes = j.at("n_classes").get<int>();
    for (const auto& f : j.at("folds")) r.folds.push_back(fold_from_json(f));
  } catch (const nlohmann::json::exception& e) {
    throw Error("bad-format", results_json.string() + ": " + e.what());
  }
  r.summary = summarize(r.folds);
  return r;
}

RunConfig apply_variant(const RunConfig& cfg, const std::string& variant) {
  RunConfig c = cfg;
  if (variant == "full") return c;
  if (variant == "no-mlst") {
    c.net.use_mlst = false;
    return c;
  }
  if (variant == "no-original") {
    c.net.use_original = false;
    return c;
  }
  const auto colon = variant.find(':');
  const std::string key = variant.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : variant.substr(colon + 1);
  try {
    if (key == "members" && !arg.empty()) {
      c.members = parse_members(arg);
      return c;
    }
    if (key == "n-sources" && !arg.empty()) {
      std::size_t used = 0;
      const int n = std::stoi(arg, &used);
      if (used == arg.size() && n >= 1) {
        c.n_source_subjects = n;
        return c;
      }
    }
  } catch (const std::exception&) {
  }
  throw Error("invalid-variant", "unknown ablation variant '" + variant + "'");
}

EvaluationResult ablation_run(const RunConfig& cfg, const std::string& variant) {
  const RunConfig c = apply_variant(cfg, variant);
  const Dataset ds = resolve_dataset(c);
  if (c.n_source_subjects >= ds.manifest.n_subjects()) {
    throw Error("invalid-variant", "n-sources must be below the subject count");
  }
  return loso_evaluate(c, ds);
}

}  // namespace ssvep
