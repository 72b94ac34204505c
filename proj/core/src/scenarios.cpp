#include "cdsim/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

namespace cdsim {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : "NA"; }

constexpr const char* kCsvHeader =
    "algorithm,mode,n,v_max,seed,cds_size_mean,lifetime_s,rreq_total,sent,delivered,pdr";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& text, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw Error("csv line " + std::to_string(line) + ": '" + text + "' is not a number");
  }
  return v;
}

}  // namespace

std::vector<RunSpec> expand_matrix(const ScenarioConfig& config, std::uint64_t seed_base) {
  std::vector<RunSpec> out;
  for (auto n : config.node_counts) {
    for (double v : config.v_max) {
      for (auto algorithm : config.algorithms) {
        for (auto seed : config.seeds) {
          for (auto mode : config.modes) {
            out.push_back(RunSpec{n, v, algorithm, mode, seed_base + seed});
          }
        }
      }
    }
  }
  return out;
}

bool record_less(const MetricsRecord& a, const MetricsRecord& b) {
  return std::make_tuple(to_string(a.algorithm), to_string(a.mode), a.nodes, a.v_max, a.seed) <
         std::make_tuple(to_string(b.algorithm), to_string(b.mode), b.nodes, b.v_max, b.seed);
}

void sort_records(std::vector<MetricsRecord>& records) {
  std::stable_sort(records.begin(), records.end(), record_less);
}

std::vector<MetricsRecord> run_matrix(const ScenarioConfig& config, const MatrixOptions& options) {
  config.validate();
  const auto specs = expand_matrix(config, options.seed_base);
  std::vector<MetricsRecord> records(specs.size());
  std::atomic<std::size_t> next{0};
  std::mutex emit;

  auto worker = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      std::unique_ptr<std::ostream> trace;
      if (options.trace_for) trace = options.trace_for(specs[i]);
      records[i] = run_simulation(config, specs[i], trace.get());
      if (options.on_record) {
        std::lock_guard<std::mutex> lock(emit);
        options.on_record(records[i]);
      }
    }
  };

  const std::size_t jobs = std::clamp<std::size_t>(options.jobs, 1, std::max<std::size_t>(specs.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  sort_records(records);
  return records;
}

void emit_csv(std::vector<MetricsRecord> records, std::ostream& out) {
  sort_records(records);
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << to_string(r.algorithm) << ',' << to_string(r.mode) << ',' << r.nodes << ','
        << num(r.v_max) << ',' << r.seed << ',';
    if (r.failed) {
      out << "NA,NA,NA,NA,NA,NA\n";
      continue;
    }
    out << num(r.cds_size_mean) << ',' << num(r.lifetime) << ',' << r.rreq_total << ',' << r.sent
        << ',' << r.delivered << ',' << num(r.pdr()) << '\n';
  }
}

void emit_csv(std::vector<MetricsRecord> records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  emit_csv(std::move(records), out);
  out.flush();
  if (!out) throw Error("error while writing '" + path.string() + "'");
}

std::vector<MetricsRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw Error("csv: unexpected header");
  std::vector<MetricsRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 11) {
      throw Error("csv line " + std::to_string(line_no) + ": expected 11 fields");
    }
    MetricsRecord r;
    try {
      r.algorithm = parse_algorithm(f[0]);
      r.mode = parse_route_mode(f[1]);
    } catch (const Error& e) {
      throw Error("csv line " + std::to_string(line_no) + ": " + e.what());
    }
    r.nodes = static_cast<std::size_t>(parse_number(f[2], line_no));
    r.v_max = parse_number(f[3], line_no);
    r.seed = static_cast<std::uint64_t>(parse_number(f[4], line_no));
    if (f[5] == "NA") {
      r.failed = true;
    } else {
      r.cds_size_mean = parse_number(f[5], line_no);
      r.lifetime = parse_number(f[6], line_no);
      r.rreq_total = static_cast<std::size_t>(parse_number(f[7], line_no));
      r.sent = static_cast<std::size_t>(parse_number(f[8], line_no));
      r.delivered = static_cast<std::size_t>(parse_number(f[9], line_no));
    }
    out.push_back(r);
  }
  return out;
}

Aggregate aggregate(const std::vector<double>& values) {
  Aggregate a;
  if (values.empty()) return a;
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - a.mean) * (v - a.mean);
    a.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return a;
}

std::vector<SummaryRow> summarize(const std::vector<MetricsRecord>& records, Algorithm baseline,
                                  std::vector<std::string>* warnings) {
  using Key = std::tuple<std::string_view, std::string_view, std::size_t, double>;
  std::map<Key, std::vector<const MetricsRecord*>> groups;
  for (const auto& r : records) {
    groups[Key{to_string(r.algorithm), to_string(r.mode), r.nodes, r.v_max}].push_back(&r);
  }

  std::vector<SummaryRow> rows;
  for (const auto& [key, members] : groups) {
    SummaryRow row;
    row.algorithm = members.front()->algorithm;
    row.mode = members.front()->mode;
    row.nodes = members.front()->nodes;
    row.v_max = members.front()->v_max;
    std::vector<double> size, life, rreq, sent, delivered, pdr;
    for (const auto* r : members) {
      if (r->failed) {
        ++row.failed;
        continue;
      }
      size.push_back(r->cds_size_mean);
      life.push_back(r->lifetime);
      rreq.push_back(static_cast<double>(r->rreq_total));
      sent.push_back(static_cast<double>(r->sent));
      delivered.push_back(static_cast<double>(r->delivered));
      pdr.push_back(r->pdr());
    }
    row.runs = size.size();
    if (row.runs == 0) {
      if (warnings != nullptr) {
        warnings->push_back("group " + std::string(to_string(row.algorithm)) + "/" +
                            std::string(to_string(row.mode)) + " n=" + std::to_string(row.nodes) +
                            " v_max=" + num(row.v_max) + " has no successful run; omitted");
      }
      continue;
    }
    row.cds_size = aggregate(size);
    row.lifetime = aggregate(life);
    row.rreq = aggregate(rreq);
    row.sent = aggregate(sent);
    row.delivered = aggregate(delivered);
    row.pdr = aggregate(pdr);
    rows.push_back(row);
  }

  auto relative = [](double value, double base) -> std::optional<double> {
    if (base == 0.0) return std::nullopt;
    return (value - base) / base;
  };
  for (auto& row : rows) {
    const auto base = std::find_if(rows.begin(), rows.end(), [&](const SummaryRow& b) {
      return b.algorithm == baseline && b.mode == row.mode && b.nodes == row.nodes &&
             b.v_max == row.v_max;
    });
    if (base == rows.end()) continue;
    row.cds_size_vs_base = relative(row.cds_size.mean, base->cds_size.mean);
    row.lifetime_vs_base = relative(row.lifetime.mean, base->lifetime.mean);
    row.rreq_vs_base = relative(row.rreq.mean, base->rreq.mean);
    row.pdr_vs_base = relative(row.pdr.mean, base->pdr.mean);
  }
  return rows;
}

void write_summary(const std::vector<SummaryRow>& rows, std::ostream& out) {
  out << "algorithm,mode,n,v_max,runs,failed,"
         "cds_size_mean,cds_size_sd,lifetime_mean,lifetime_sd,rreq_mean,rreq_sd,"
         "sent_mean,sent_sd,delivered_mean,delivered_sd,pdr_mean,pdr_sd,"
         "cds_size_vs_base,lifetime_vs_base,rreq_vs_base,pdr_vs_base\n";
  for (const auto& r : rows) {
    out << to_string(r.algorithm) << ',' << to_string(r.mode) << ',' << r.nodes << ','
        << num(r.v_max) << ',' << r.runs << ',' << r.failed;
    for (const Aggregate* a : {&r.cds_size, &r.lifetime, &r.rreq, &r.sent, &r.delivered, &r.pdr}) {
      out << ',' << num(a->mean) << ',' << num(a->stddev);
    }
    out << ',' << opt_num(r.cds_size_vs_base) << ',' << opt_num(r.lifetime_vs_base) << ','
        << opt_num(r.rreq_vs_base) << ',' << opt_num(r.pdr_vs_base) << '\n';
  }
}

}  // namespace cdsim
