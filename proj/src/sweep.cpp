#include "fhn/sweep.hpp"

#include "fhn/error.hpp"
#include "fhn/kernels.hpp"
#include "fhn/serialize.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include <unistd.h>

namespace fhn {

namespace {

constexpr const char* kCheckpointMagic = "# fhn-sweep-checkpoint v1";

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw Error(ErrorKind::ConfigError, "bad number for " + what + ": '" + s + "'");
  return v;
}

long parse_long(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw Error(ErrorKind::ConfigError, "bad integer for " + what + ": '" + s + "'");
  return v;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string cell_row(const CellRecord& c) {
  std::string out = format_double(c.omega) + ',' + format_double(c.e) + ',' + c.status + ',';
  if (c.ok()) out += std::to_string(c.spike_count) + ',' + format_double(c.l2);
  else out += ',';
  out += ',';
  if (c.ok() && c.est_count) out += std::to_string(*c.est_count);
  out += ',' + c.region;
  return out;
}

CellRecord parse_cell_row(const std::vector<std::string>& f, std::size_t first) {
  if (f.size() != first + 7) throw Error(ErrorKind::IoError, "grid row has the wrong field count");
  CellRecord c;
  c.omega = parse_double(f[first], "omega");
  c.e = parse_double(f[first + 1], "E");
  c.status = f[first + 2];
  if (!f[first + 3].empty()) c.spike_count = static_cast<int>(parse_long(f[first + 3], "spike_count"));
  if (!f[first + 4].empty()) c.l2 = parse_double(f[first + 4], "l2");
  if (!f[first + 5].empty()) c.est_count = static_cast<int>(parse_long(f[first + 5], "est_count"));
  c.region = f[first + 6];
  c.done = true;
  return c;
}

SweepGrid empty_grid(const SweepSpec& spec) {
  SweepGrid g;
  g.omegas = spec.omega.values();
  g.es = spec.e.values();
  g.spec_hash = spec.hash();
  g.cells.resize(g.omegas.size() * g.es.size());
  for (std::size_t j = 0; j < g.es.size(); ++j)
    for (std::size_t i = 0; i < g.omegas.size(); ++i) {
      auto& c = g.cells[g.index(i, j)];
      c.omega = g.omegas[i];
      c.e = g.es[j];
    }
  return g;
}

// Loads complete records from a checkpoint log and trims a torn tail.
void load_checkpoint(const std::filesystem::path& path, const SweepSpec& spec, SweepGrid& grid) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return;
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  in.close();
  if (text.empty()) return;

  const std::size_t complete = text.rfind('\n');
  if (complete == std::string::npos) {
    std::filesystem::resize_file(path, 0);
    return;
  }
  std::istringstream lines(text.substr(0, complete + 1));
  std::string line;
  std::getline(lines, line);
  if (line != kCheckpointMagic) throw Error(ErrorKind::ConfigError, "not a sweep checkpoint: " + path.string());
  std::getline(lines, line);
  const std::string expect = "spec " + hex64(spec.hash()) + " cells " + std::to_string(spec.cell_count());
  if (line != expect)
    throw Error(ErrorKind::ConfigError, "checkpoint belongs to a different sweep spec: " + path.string());
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    const auto idx = static_cast<std::size_t>(parse_long(fields.at(0), "cell index"));
    if (idx >= grid.cells.size()) throw Error(ErrorKind::IoError, "checkpoint cell index out of range");
    grid.cells[idx] = parse_cell_row(fields, 1);
  }
  if (complete + 1 != text.size()) std::filesystem::resize_file(path, complete + 1);
}

class CheckpointWriter {
 public:
  CheckpointWriter(const std::filesystem::path& path, const SweepSpec& spec) {
    const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    file_ = std::fopen(path.c_str(), "ab");
    if (!file_) throw Error(ErrorKind::IoError, "cannot open checkpoint " + path.string());
    if (fresh) {
      const std::string head = std::string(kCheckpointMagic) + "\nspec " + hex64(spec.hash()) +
                               " cells " + std::to_string(spec.cell_count()) + "\n";
      write(head);
    }
  }
  ~CheckpointWriter() {
    if (file_) std::fclose(file_);
  }
  CheckpointWriter(const CheckpointWriter&) = delete;
  CheckpointWriter& operator=(const CheckpointWriter&) = delete;

  void write(const std::string& text) {
    if (std::fwrite(text.data(), 1, text.size(), file_) != text.size() || std::fflush(file_) != 0)
      throw Error(ErrorKind::IoError, "checkpoint write failed");
    ::fsync(::fileno(file_));
  }

 private:
  std::FILE* file_ = nullptr;
};

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw Error(ErrorKind::IoError, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

AxisRange AxisRange::with_count(double lo, double hi, int n) {
  if (n < 1) throw Error(ErrorKind::ConfigError, "axis needs at least one point");
  AxisRange r{lo, hi, n == 1 ? 1.0 : (hi - lo) / (n - 1)};
  if (n == 1) r.hi = lo;
  return r;
}

std::size_t AxisRange::size() const {
  if (hi == lo) return 1;
  return static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
}

std::vector<double> AxisRange::values() const {
  const std::size_t n = size();
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + static_cast<double>(i) * step;
  // Land exactly on hi when the step divides the range.
  if (n > 1 && std::abs(v.back() - hi) <= 1e-9 * step) v.back() = hi;
  return v;
}

void AxisRange::validate(const char* name) const {
  if (!(std::isfinite(lo) && std::isfinite(hi) && std::isfinite(step)))
    throw Error(ErrorKind::ConfigError, std::string(name) + " range must be finite");
  if (!(step > 0.0)) throw Error(ErrorKind::ConfigError, std::string(name) + " step must be positive");
  if (!(hi >= lo)) throw Error(ErrorKind::ConfigError, std::string(name) + " range is reversed");
}

void SweepSpec::validate() const {
  omega.validate("omega");
  e.validate("E");
  if (!(omega.lo > 0.0)) throw Error(ErrorKind::ConfigError, "omega must be positive");
  if (!(e.lo >= 0.0)) throw Error(ErrorKind::ConfigError, "E must be non-negative");
  if (workers < 1) throw Error(ErrorKind::ConfigError, "workers must be >= 1");
  if (checkpoint_every < 1) throw Error(ErrorKind::ConfigError, "checkpoint_every must be >= 1");
  if (!(f_burst > 0.0)) throw Error(ErrorKind::ConfigError, "f_burst must be positive");
  if (metrics == 0 || metrics > 0xF) throw Error(ErrorKind::ConfigError, "no valid metrics selected");
  params.validate();
  integrator.validate();
}

std::string SweepSpec::canonical() const {
  std::string s;
  auto add = [&](const char* key, const std::string& v) {
    s += key;
    s += '=';
    s += v;
    s += '\n';
  };
  std::string om;
  for (double v : omega.values()) om += format_double(v) + ' ';
  std::string ee;
  for (double v : e.values()) ee += format_double(v) + ' ';
  add("omega", om);
  add("E", ee);
  add("metrics", std::to_string(metrics));
  add("a", format_double(params.a));
  add("b", format_double(params.b));
  add("eps", format_double(params.eps));
  add("rel_tol", format_double(integrator.rel_tol));
  add("abs_tol", format_double(integrator.abs_tol));
  add("max_step", integrator.max_step ? format_double(*integrator.max_step) : "none");
  add("f_burst", format_double(f_burst));
  add("version", FHN_VERSION);
  return s;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t SweepSpec::hash() const { return fnv1a64(canonical()); }

void apply_spec_key(SweepSpec& spec, const std::string& key, const std::string& value) {
  auto count = [&](AxisRange& r) {
    const long n = parse_long(value, key);
    if (n < 1) throw Error(ErrorKind::ConfigError, key + " must be >= 1");
    r.step = n == 1 ? 1.0 : (r.hi - r.lo) / static_cast<double>(n - 1);
    if (n == 1) r.hi = r.lo;
  };
  if (key == "omega_min") spec.omega.lo = parse_double(value, key);
  else if (key == "omega_max") spec.omega.hi = parse_double(value, key);
  else if (key == "omega_step") spec.omega.step = parse_double(value, key);
  else if (key == "omega_points") count(spec.omega);
  else if (key == "E_min") spec.e.lo = parse_double(value, key);
  else if (key == "E_max") spec.e.hi = parse_double(value, key);
  else if (key == "E_step") spec.e.step = parse_double(value, key);
  else if (key == "E_points") count(spec.e);
  else if (key == "workers") spec.workers = static_cast<int>(parse_long(value, key));
  else if (key == "a") spec.params.a = parse_double(value, key);
  else if (key == "b") spec.params.b = parse_double(value, key);
  else if (key == "eps") spec.params.eps = parse_double(value, key);
  else if (key == "rel_tol") spec.integrator.rel_tol = parse_double(value, key);
  else if (key == "abs_tol") spec.integrator.abs_tol = parse_double(value, key);
  else if (key == "f_burst") spec.f_burst = parse_double(value, key);
  else if (key == "checkpoint_every")
    spec.checkpoint_every = static_cast<std::size_t>(std::max(1L, parse_long(value, key)));
  else if (key == "metrics") {
    unsigned m = 0;
    for (const auto& raw : split(value, ',')) {
      const std::string name = trim(raw);
      if (name == "spike_count") m |= static_cast<unsigned>(Metric::SpikeCount);
      else if (name == "l2") m |= static_cast<unsigned>(Metric::L2);
      else if (name == "est_count") m |= static_cast<unsigned>(Metric::EstCount);
      else if (name == "region") m |= static_cast<unsigned>(Metric::Region);
      else throw Error(ErrorKind::ConfigError, "unknown metric '" + name + "'");
    }
    spec.metrics = m;
  } else {
    throw Error(ErrorKind::ConfigError, "unknown sweep key '" + key + "'");
  }
}

SweepSpec parse_sweep_spec(const std::string& text) {
  SweepSpec spec;
  // Point counts depend on the range, so they are applied last.
  std::vector<std::pair<std::string, std::string>> deferred;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key == "omega_points" || key == "E_points") deferred.emplace_back(key, value);
    else apply_spec_key(spec, key, value);
  }
  for (const auto& [k, v] : deferred) apply_spec_key(spec, k, v);
  spec.validate();
  return spec;
}

SweepSpec load_sweep_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot read sweep spec " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_sweep_spec(ss.str());
}

CellRecord run_cell(const SweepSpec& spec, double omega, double e) {
  CellRecord c;
  c.omega = omega;
  c.e = e;
  c.done = true;
  const Forcing f{e, omega};
  std::optional<Region> region;
  try {
    region = classify_region(spec.params, f);
    if (spec.wants(Metric::Region)) c.region = std::string(to_string(*region));
    const StandardRun run = simulate_standard(spec.params, f, spec.integrator);
    c.spike_count = count_spikes(run.trajectory, run.n_periods);
    c.l2 = l2_norm(run.trajectory, run.period);
    c.status = "ok";
    if (spec.wants(Metric::EstCount)) {
      c.est_count = -1;
      if (*region == Region::II || *region == Region::III) {
        try {
          c.est_count = estimate_spike_count(run, spec.params, f, spec.f_burst).estimate;
        } catch (const Error& err) {
          if (err.kind() == ErrorKind::NoFirstSpike) c.est_count = 0;
        }
      }
    }
  } catch (const Error& err) {
    c.status = err.kind_name();
    c.est_count.reset();
  }
  return c;
}

bool SweepGrid::complete() const { return pending() == 0; }

std::size_t SweepGrid::pending() const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [](const CellRecord& c) { return !c.done; }));
}

SweepGrid run_sweep(const SweepSpec& spec, const SweepOptions& options) {
  spec.validate();
  SweepGrid grid = empty_grid(spec);
  if (options.checkpoint) load_checkpoint(*options.checkpoint, spec, grid);

  std::vector<std::size_t> todo;
  for (std::size_t k = 0; k < grid.cells.size(); ++k)
    if (!grid.cells[k].done) todo.push_back(k);
  if (options.stop_after && *options.stop_after < todo.size()) todo.resize(*options.stop_after);

  std::optional<CheckpointWriter> writer;
  if (options.checkpoint && !todo.empty()) writer.emplace(*options.checkpoint, spec);

  const std::size_t workers = static_cast<std::size_t>(spec.workers);
  for (std::size_t start = 0; start < todo.size(); start += spec.checkpoint_every) {
    const std::size_t n = std::min(spec.checkpoint_every, todo.size() - start);
    std::vector<CellRecord> results(n);
    auto work = [&](std::size_t lo, std::size_t hi) {
      for (std::size_t k = lo; k < hi; ++k) {
        const auto& cell = grid.cells[todo[start + k]];
        results[k] = run_cell(spec, cell.omega, cell.e);
      }
    };
    const std::size_t w = std::min(workers, n);
    if (w <= 1) {
      work(0, n);
    } else {
      std::vector<std::thread> pool;
      const std::size_t chunk = (n + w - 1) / w;
      for (std::size_t t = 0; t < w; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo < hi) pool.emplace_back(work, lo, hi);
      }
      for (auto& th : pool) th.join();
    }
    std::string log;
    for (std::size_t k = 0; k < n; ++k) {
      grid.cells[todo[start + k]] = results[k];
      log += std::to_string(todo[start + k]) + ',' + cell_row(results[k]) + '\n';
    }
    if (writer) writer->write(log);
  }
  writer.reset();

  if (grid.complete() && options.output) {
    write_grid_csv(grid, *options.output);
    nlohmann::json meta = {{"spec_hash", hex64(grid.spec_hash)},
                           {"version", FHN_VERSION},
                           {"timestamp", utc_timestamp()},
                           {"isa", kernels::isa_name(kernels::active_isa())},
                           {"workers", spec.workers},
                           {"cells", grid.cells.size()},
                           {"failed_cells", std::count_if(grid.cells.begin(), grid.cells.end(),
                                                          [](const CellRecord& c) { return !c.ok(); })}};
    write_file_atomic(options.output->string() + ".meta.json", meta.dump(2) + "\n");
    if (options.checkpoint) std::filesystem::remove(*options.checkpoint);
  }
  return grid;
}

std::string grid_csv(const SweepGrid& grid) {
  std::string out = std::string(kGridHeader) + "\n";
  for (const auto& c : grid.cells) out += cell_row(c) + '\n';
  return out;
}

void write_grid_csv(const SweepGrid& grid, const std::filesystem::path& path) {
  if (!grid.complete()) throw Error(ErrorKind::IncompleteGrid, "grid has pending cells");
  write_file_atomic(path, grid_csv(grid));
}

SweepGrid parse_grid_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || trim(line) != kGridHeader)
    throw Error(ErrorKind::IoError, "grid CSV header mismatch");
  std::vector<CellRecord> rows;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    rows.push_back(parse_cell_row(split(line, ','), 0));
  }
  // Recover the axes from the row-major layout: omega varies fastest.
  SweepGrid g;
  for (const auto& r : rows) {
    if (!g.omegas.empty() && r.omega <= g.omegas.back()) break;
    g.omegas.push_back(r.omega);
  }
  if (g.omegas.empty() || rows.size() % g.omegas.size() != 0)
    throw Error(ErrorKind::IoError, "grid CSV is not a full rectangular grid");
  for (std::size_t j = 0; j < rows.size() / g.omegas.size(); ++j)
    g.es.push_back(rows[j * g.omegas.size()].e);
  for (std::size_t j = 0; j < g.es.size(); ++j)
    for (std::size_t i = 0; i < g.omegas.size(); ++i) {
      const auto& r = rows[j * g.omegas.size() + i];
      if (r.omega != g.omegas[i] || r.e != g.es[j])
        throw Error(ErrorKind::IoError, "grid CSV rows are not in row-major order");
    }
  g.cells = std::move(rows);
  return g;
}

SweepGrid read_grid_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read grid " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_grid_csv(ss.str());
}

ScalarGrid metric_field(const SweepGrid& grid, Metric metric) {
  ScalarGrid f;
  f.xs = grid.omegas;
  f.ys = grid.es;
  f.values.resize(grid.cells.size());
  f.valid.resize(grid.cells.size());
  for (std::size_t k = 0; k < grid.cells.size(); ++k) {
    const auto& c = grid.cells[k];
    bool ok = c.done && c.ok();
    double v = 0.0;
    switch (metric) {
      case Metric::SpikeCount: v = c.spike_count; break;
      case Metric::L2: v = c.l2; break;
      case Metric::EstCount:
        ok = ok && c.est_count && *c.est_count >= 0;
        v = ok ? *c.est_count : 0.0;
        break;
      case Metric::Region: throw Error(ErrorKind::DomainError, "region is not a scalar metric");
    }
    f.values[k] = v;
    f.valid[k] = ok ? 1 : 0;
  }
  return f;
}

std::vector<Polyline> extract_boundaries(const SweepGrid& grid) {
  if (!grid.complete()) throw Error(ErrorKind::IncompleteGrid, "grid has pending cells");
  const ScalarGrid f = metric_field(grid, Metric::SpikeCount);
  return marching_squares(f, half_integer_levels(f));
}

std::vector<Polyline> l2_levelsets(const SweepGrid& grid, int n_levels) {
  if (!grid.complete()) throw Error(ErrorKind::IncompleteGrid, "grid has pending cells");
  const ScalarGrid f = metric_field(grid, Metric::L2);
  return marching_squares(f, even_levels(f, n_levels));
}

}  // namespace fhn
