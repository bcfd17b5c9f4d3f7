#include <mpw/sweep.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include <mpw/version.hpp>

namespace mpw {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string g12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

const char* const kCsvHeader =
    "n_f,n_b,eps_f,eps_b,v_f,v_b,mu,energy,lambda_g_f,lambda_g_b,bound_f,bound_b,"
    "converged,iterations,wall_time_ms";

std::size_t AxisSpec::count() const {
  if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step)) {
    throw ParameterError("axis " + name + ": endpoints and step must be finite");
  }
  if (start == stop) return 1;
  if (step == 0.0) throw ParameterError("axis " + name + ": step must be nonzero");
  const double span = (stop - start) / step;
  if (span < 0.0) throw ParameterError("axis " + name + ": step points away from stop");
  const double n = std::floor(span + 1e-9) + 1.0;
  if (n > 1e6) throw ParameterError("axis " + name + ": more than 1e6 grid points");
  return static_cast<std::size_t>(n);
}

std::string normalize_axis_name(const std::string& name) {
  std::string key;
  for (char c : name) {
    if (c == '-' || c == '_' || std::isspace(static_cast<unsigned char>(c))) continue;
    key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (key == "vf") return "v_f";
  if (key == "vb") return "v_b";
  if (key == "mu") return "mu";
  if (key == "epsf") return "eps_f";
  if (key == "epsb") return "eps_b";
  throw ParameterError("unknown sweep axis '" + name +
                       "' (expected one of v_f, v_b, mu, eps_f, eps_b)");
}

void apply_axis(SystemParams& params, const std::string& canonical_name, double value) {
  if (canonical_name == "v_f") {
    params.v_f = value;
  } else if (canonical_name == "v_b") {
    params.v_b = value;
  } else if (canonical_name == "mu") {
    params.mu = value;
  } else if (canonical_name == "eps_f") {
    params.eps_f = value;
  } else if (canonical_name == "eps_b") {
    params.eps_b = value;
  } else {
    throw ParameterError("apply_axis: unknown axis '" + canonical_name + "'");
  }
}

std::string row_key(const SystemParams& p) {
  return std::to_string(p.n_f) + "|" + std::to_string(p.n_b) + "|" + g12(p.eps_f) + "|" +
         g12(p.eps_b) + "|" + g12(p.v_f) + "|" + g12(p.v_b) + "|" + g12(p.mu);
}

namespace {

std::vector<SystemParams> build_grid(const SweepSpec& spec) {
  if (spec.axes.empty() || spec.axes.size() > 2) {
    throw ParameterError("a sweep needs one or two axes");
  }
  for (const auto& axis : spec.axes) {
    if (normalize_axis_name(axis.name) != axis.name) {
      throw ParameterError("axis name '" + axis.name + "' is not canonical");
    }
  }
  std::size_t total = 1;
  for (const auto& axis : spec.axes) total *= axis.count();
  if (total > 2'000'000) throw ParameterError("sweep grid exceeds 2e6 points");
  std::vector<SystemParams> grid;
  const AxisSpec& a0 = spec.axes[0];
  if (spec.axes.size() == 1) {
    grid.reserve(a0.count());
    for (std::size_t i = 0; i < a0.count(); ++i) {
      SystemParams p = spec.base;
      apply_axis(p, a0.name, a0.value(i));
      grid.push_back(p);
    }
    return grid;
  }
  const AxisSpec& a1 = spec.axes[1];
  grid.reserve(a0.count() * a1.count());
  for (std::size_t i = 0; i < a0.count(); ++i) {
    for (std::size_t j = 0; j < a1.count(); ++j) {
      SystemParams p = spec.base;
      apply_axis(p, a0.name, a0.value(i));
      apply_axis(p, a1.name, a1.value(j));
      grid.push_back(p);
    }
  }
  return grid;
}

SweepRow evaluate_point(const SystemParams& params, const SweepSpec& spec,
                        std::size_t rdm_budget) {
  SweepRow row;
  row.params = params;
  try {
    const WitnessResult w = compute_witness(params, spec.solve, spec.path, rdm_budget);
    row.energy = w.energy;
    row.lambda_g_f = w.fermion ? w.fermion->lambda_g : kNan;
    row.bound_f = w.fermion ? w.fermion->bound : kNan;
    row.lambda_g_b = w.boson ? w.boson->lambda_g : kNan;
    row.bound_b = w.boson ? w.boson->bound : kNan;
    row.converged = w.diagnostics.converged;
    row.iterations = w.diagnostics.iterations;
  } catch (const std::exception&) {
    row.energy = kNan;
    row.lambda_g_f = row.lambda_g_b = row.bound_f = row.bound_b = kNan;
    row.converged = false;
    row.iterations = 0;
  }
  row.wall_time_ms = 0;
  return row;
}

int resolve_workers(int requested) {
  int workers = requested;
  if (workers <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    workers = static_cast<int>(std::clamp(hw, 1u, 8u));
  }
  if (const char* env = std::getenv("MPW_WORKERS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) workers = std::min(workers, cap);
  }
  return std::max(workers, 1);
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const SweepOptions& options,
                                SweepRunStats* stats) {
  const auto t0 = std::chrono::steady_clock::now();
  validate_params(spec.base);
  const std::vector<SystemParams> grid = build_grid(spec);

  std::unordered_map<std::string, const SweepRow*> reusable;
  if (options.existing != nullptr) {
    for (const auto& row : *options.existing) {
      if (options.retry_failed && !row.converged) continue;
      reusable.emplace(row_key(row.params), &row);
    }
  }

  std::vector<SweepRow> rows(grid.size());
  std::vector<std::size_t> jobs;
  std::size_t reused = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto it = reusable.find(row_key(grid[k]));
    if (it != reusable.end()) {
      rows[k] = *it->second;
      rows[k].params = grid[k];  // keep the grid's own parameter values
      ++reused;
    } else {
      jobs.push_back(k);
    }
  }

  const int workers = std::min(resolve_workers(options.workers),
                               static_cast<int>(std::max<std::size_t>(jobs.size(), 1)));
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;

  auto work = [&]() {
    while (true) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs.size()) break;
      const std::size_t k = jobs[j];
      rows[k] = evaluate_point(grid[k], spec, options.rdm_memory_budget);
      const std::size_t finished = done.fetch_add(1) + 1;
      if (options.on_progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        options.on_progress(finished + reused, grid.size());
      }
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  if (stats != nullptr) {
    stats->total = grid.size();
    stats->computed = jobs.size();
    stats->reused = reused;
    stats->failed = static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.converged; }));
    stats->workers = workers;
    stats->wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return rows;
}

std::optional<double> onset_threshold(const std::vector<SweepRow>& rows, SectorTag sector,
                                      double level) {
  if (rows.empty()) throw ParameterError("onset_threshold: no rows");
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const SystemParams& a = rows[k - 1].params;
    const SystemParams& b = rows[k].params;
    if (!(b.mu > a.mu)) {
      throw ParameterError("onset_threshold: rows must ascend in mu");
    }
    if (a.n_f != b.n_f || a.n_b != b.n_b || a.eps_f != b.eps_f || a.eps_b != b.eps_b ||
        a.v_f != b.v_f || a.v_b != b.v_b) {
      throw ParameterError("onset_threshold: rows vary in a parameter other than mu");
    }
  }
  for (const auto& row : rows) {
    const double lambda = sector == SectorTag::Fermion ? row.lambda_g_f : row.lambda_g_b;
    if (std::isnan(lambda)) continue;
    if (lambda >= level) return row.params.mu;
  }
  return std::nullopt;
}

namespace {

std::string csv_line(const SweepRow& r) {
  std::ostringstream out;
  out << r.params.n_f << ',' << r.params.n_b << ',' << g12(r.params.eps_f) << ','
      << g12(r.params.eps_b) << ',' << g12(r.params.v_f) << ',' << g12(r.params.v_b) << ','
      << g12(r.params.mu) << ',' << g12(r.energy) << ',' << g12(r.lambda_g_f) << ','
      << g12(r.lambda_g_b) << ',' << g12(r.bound_f) << ',' << g12(r.bound_b) << ','
      << (r.converged ? 1 : 0) << ',' << r.iterations << ',' << r.wall_time_ms;
  return out.str();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(field);
  return fields;
}

void write_rows_csv(const std::string& path, const std::vector<SweepRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResourceError("cannot open '" + path + "' for writing");
  out << kCsvHeader << '\n';
  for (const auto& row : rows) out << csv_line(row) << '\n';
  if (!out.good()) throw ResourceError("write to '" + path + "' failed");
}

std::vector<SweepRow> read_rows_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ResourceError("cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(in, line)) throw IntegrityError("'" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) {
    throw IntegrityError("'" + path + "' does not carry the expected sweep header");
  }
  std::vector<SweepRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 15) {
      throw IntegrityError("'" + path + "' line " + std::to_string(lineno) +
                           ": expected 15 fields");
    }
    SweepRow r;
    r.params.n_f = std::stoi(fields[0]);
    r.params.n_b = std::stoi(fields[1]);
    r.params.eps_f = std::strtod(fields[2].c_str(), nullptr);
    r.params.eps_b = std::strtod(fields[3].c_str(), nullptr);
    r.params.v_f = std::strtod(fields[4].c_str(), nullptr);
    r.params.v_b = std::strtod(fields[5].c_str(), nullptr);
    r.params.mu = std::strtod(fields[6].c_str(), nullptr);
    r.energy = std::strtod(fields[7].c_str(), nullptr);
    r.lambda_g_f = std::strtod(fields[8].c_str(), nullptr);
    r.lambda_g_b = std::strtod(fields[9].c_str(), nullptr);
    r.bound_f = std::strtod(fields[10].c_str(), nullptr);
    r.bound_b = std::strtod(fields[11].c_str(), nullptr);
    r.converged = fields[12] == "1";
    r.iterations = std::stoi(fields[13]);
    r.wall_time_ms = std::stoll(fields[14]);
    rows.push_back(r);
  }
  return rows;
}

nlohmann::json row_json(const SweepRow& r) {
  auto opt = [](double x) {
    return std::isnan(x) ? nlohmann::json(nullptr) : nlohmann::json(x);
  };
  return nlohmann::json{{"n_f", r.params.n_f},
                        {"n_b", r.params.n_b},
                        {"eps_f", r.params.eps_f},
                        {"eps_b", r.params.eps_b},
                        {"v_f", r.params.v_f},
                        {"v_b", r.params.v_b},
                        {"mu", r.params.mu},
                        {"energy", opt(r.energy)},
                        {"lambda_g_f", opt(r.lambda_g_f)},
                        {"lambda_g_b", opt(r.lambda_g_b)},
                        {"bound_f", opt(r.bound_f)},
                        {"bound_b", opt(r.bound_b)},
                        {"converged", r.converged},
                        {"iterations", r.iterations},
                        {"wall_time_ms", r.wall_time_ms}};
}

void write_rows_jsonl(const std::string& path, const std::vector<SweepRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResourceError("cannot open '" + path + "' for writing");
  for (const auto& row : rows) out << row_json(row).dump() << '\n';
  if (!out.good()) throw ResourceError("write to '" + path + "' failed");
}

std::vector<SweepRow> read_rows_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ResourceError("cannot open '" + path + "' for reading");
  std::vector<SweepRow> rows;
  std::string line;
  std::size_t lineno = 0;
  auto opt = [](const nlohmann::json& j, const char* key) {
    const auto& v = j.at(key);
    return v.is_null() ? kNan : v.get<double>();
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw IntegrityError("'" + path + "' line " + std::to_string(lineno) + ": " + e.what());
    }
    SweepRow r;
    r.params.n_f = j.at("n_f").get<int>();
    r.params.n_b = j.at("n_b").get<int>();
    r.params.eps_f = j.at("eps_f").get<double>();
    r.params.eps_b = j.at("eps_b").get<double>();
    r.params.v_f = j.at("v_f").get<double>();
    r.params.v_b = j.at("v_b").get<double>();
    r.params.mu = j.at("mu").get<double>();
    r.energy = opt(j, "energy");
    r.lambda_g_f = opt(j, "lambda_g_f");
    r.lambda_g_b = opt(j, "lambda_g_b");
    r.bound_f = opt(j, "bound_f");
    r.bound_b = opt(j, "bound_b");
    r.converged = j.at("converged").get<bool>();
    r.iterations = j.at("iterations").get<int>();
    r.wall_time_ms = j.at("wall_time_ms").get<long long>();
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

void write_rows(const std::string& path, const std::vector<SweepRow>& rows) {
  if (ends_with(path, ".jsonl")) {
    write_rows_jsonl(path, rows);
  } else {
    write_rows_csv(path, rows);
  }
}

std::vector<SweepRow> read_rows(const std::string& path) {
  if (ends_with(path, ".jsonl")) return read_rows_jsonl(path);
  return read_rows_csv(path);
}

void write_sidecar(const std::string& out_path, const SweepSpec& spec,
                   const SweepRunStats& stats) {
  nlohmann::json axes = nlohmann::json::array();
  for (const auto& axis : spec.axes) {
    axes.push_back({{"name", axis.name},
                    {"start", axis.start},
                    {"stop", axis.stop},
                    {"step", axis.step},
                    {"count", axis.count()}});
  }

  char when[32] = {0};
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  std::strftime(when, sizeof(when), "%Y-%m-%dT%H:%M:%SZ", &utc);

  const nlohmann::json meta = {
      {"tool", "mpw"},
      {"version", kVersion},
      {"created", when},
      {"solver",
       {{"path", to_string(spec.path)},
        {"tolerance", spec.solve.tolerance},
        {"max_iterations", spec.solve.max_iterations},
        {"seed", spec.solve.seed},
        {"reorthogonalization",
         spec.solve.reorthogonalization == Reorthogonalization::Full ? "full" : "none"}}},
      {"base",
       {{"n_f", spec.base.n_f},
        {"n_b", spec.base.n_b},
        {"eps_f", spec.base.eps_f},
        {"eps_b", spec.base.eps_b},
        {"v_f", spec.base.v_f},
        {"v_b", spec.base.v_b},
        {"mu", spec.base.mu}}},
      {"axes", axes},
      {"rows",
       {{"total", stats.total},
        {"computed", stats.computed},
        {"reused", stats.reused},
        {"failed", stats.failed}}},
      {"workers", stats.workers},
      {"wall_seconds", stats.wall_seconds},
  };

  const std::string path = out_path + ".meta.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResourceError("cannot open '" + path + "' for writing");
  out << meta.dump(2) << '\n';
  if (!out.good()) throw ResourceError("write to '" + path + "' failed");
}

}  // namespace mpw
