#include "migsim/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "migsim/config.hpp"
#include "migsim/errors.hpp"

namespace migsim {

namespace {

using nlohmann::json;

constexpr char kFieldMagic[8] = {'M', 'I', 'G', 'F', 'L', 'D', '0', '1'};

std::string fmt(double d) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", d);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  return out;
}

const char* status_name(ReplicateStatus s) {
  return s == ReplicateStatus::Completed ? "completed" : "absorbed_empty";
}

}  // namespace

void write_snapshots_csv(const std::filesystem::path& path,
                         std::span<const ReplicateRecord> records, int dim,
                         std::uint64_t config_hash) {
  auto out = open_out(path);
  out << "# config_hash=" << hash_hex(config_hash) << "\n";
  out << "replicate_id,time,point_id,x1";
  if (dim == 2) out << ",x2";
  out << "\n";
  for (const auto& rec : records) {
    for (const auto& snap : rec.snapshots) {
      if (snap.points.empty()) {
        out << rec.replicate_id << "," << fmt(snap.time) << ",-1,0";
        if (dim == 2) out << ",0";
        out << "\n";
        continue;
      }
      for (const auto& [id, p] : snap.points) {
        out << rec.replicate_id << "," << fmt(snap.time) << "," << id << ","
            << fmt(p[0]);
        if (dim == 2) out << "," << fmt(p[1]);
        out << "\n";
      }
    }
  }
}

std::vector<ReplicateRecord> read_snapshots_csv(const std::filesystem::path& path,
                                                int dim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read file: " + path.string());
  std::vector<ReplicateRecord> records;
  std::unordered_map<std::uint64_t, std::size_t> index;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;  // column header
      continue;
    }
    std::istringstream ss(line);
    std::string tok;
    auto next = [&]() {
      if (!std::getline(ss, tok, ',')) {
        throw std::runtime_error("snapshot csv: short row: " + line);
      }
      return tok;
    };
    const std::uint64_t rid = std::stoull(next());
    const double time = std::stod(next());
    const long long pid = std::stoll(next());
    Position p{std::stod(next()), 0.0};
    if (dim == 2) p[1] = std::stod(next());

    auto it = index.find(rid);
    if (it == index.end()) {
      it = index.emplace(rid, records.size()).first;
      records.push_back(ReplicateRecord{});
      records.back().replicate_id = rid;
    }
    ReplicateRecord& rec = records[it->second];
    if (rec.snapshots.empty() || rec.snapshots.back().time != time) {
      rec.snapshots.push_back(Snapshot{time, {}});
    }
    if (pid >= 0) {
      rec.snapshots.back().points.emplace_back(static_cast<std::uint64_t>(pid), p);
    }
  }
  for (auto& rec : records) {
    if (!rec.snapshots.empty()) {
      rec.final_time = rec.snapshots.back().time;
      rec.final_population = rec.snapshots.back().points.size();
    }
  }
  return records;
}

void write_replicates_json(const std::filesystem::path& path,
                           std::span<const ReplicateRecord> records,
                           std::uint64_t config_hash) {
  json doc;
  doc["config_hash"] = hash_hex(config_hash);
  json rows = json::array();
  for (const auto& rec : records) {
    json row;
    row["replicate_id"] = rec.replicate_id;
    row["seed"] = rec.seed;
    row["status"] = status_name(rec.status);
    row["events"] = rec.events;
    row["final_population"] = rec.final_population;
    row["final_time"] = rec.final_time;
    json times = json::array();
    json counts = json::array();
    for (const auto& snap : rec.snapshots) {
      times.push_back(snap.time);
      counts.push_back(snap.points.size());
    }
    row["snapshot_times"] = std::move(times);
    row["snapshot_counts"] = std::move(counts);
    rows.push_back(std::move(row));
  }
  doc["replicates"] = std::move(rows);
  write_text_file(path, doc.dump(2) + "\n");
}

void write_event_log_csv(const std::filesystem::path& path,
                         const ReplicateRecord& record, int dim) {
  auto out = open_out(path);
  out << "time,kind,point_id,x1";
  if (dim == 2) out << ",x2";
  out << "\n";
  for (const Event& ev : record.event_log) {
    out << fmt(ev.time) << ","
        << (ev.kind == EventKind::Birth ? "birth" : "death") << ","
        << ev.point_id << "," << fmt(ev.position[0]);
    if (dim == 2) out << "," << fmt(ev.position[1]);
    out << "\n";
  }
}

void write_certificate_json(const std::filesystem::path& path,
                            const CertificateReport& report, double time,
                            std::size_t box_index, std::uint64_t config_hash) {
  json doc;
  doc["config_hash"] = hash_hex(config_hash);
  doc["time"] = time;
  doc["box_index"] = box_index;
  doc["replicates"] = report.replicates;
  doc["box_volume"] = report.box_volume;
  doc["kappa_hat"] = report.kappa_hat;
  doc["benchmark_mass"] = report.benchmark_mass;
  doc["n_max"] = report.n_max;
  doc["confidence"] = report.confidence;
  doc["tests"] = report.tests;
  doc["alpha_each"] = report.alpha_each;
  doc["pass"] = report.pass;
  doc["note"] = report.note;
  json rows = json::array();
  for (const auto& row : report.rows) {
    json r;
    r["order"] = row.order;
    r["pmf_hat"] = row.pmf_hat;
    r["pmf_lo"] = row.pmf_lo;
    r["pmf_bound"] = row.pmf_bound;
    r["pmf_violation"] = row.pmf_violation;
    r["moment_hat"] = row.moment_hat;
    r["moment_lo"] = row.moment_lo;
    r["moment_ref"] = row.moment_ref;
    r["moment_violation"] = row.moment_violation;
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  if (report.dispersion_defined) {
    doc["dispersion"] = {{"value", report.di_hat},
                         {"lower", report.di_lo},
                         {"violation", report.di_violation}};
  } else {
    doc["dispersion"] = nullptr;
  }
  write_text_file(path, doc.dump(2) + "\n");
}

void write_pair_correlation_csv(const std::filesystem::path& path,
                                std::span<const PairCorrelationBin> bins,
                                double time, std::uint64_t config_hash) {
  auto out = open_out(path);
  out << "# config_hash=" << hash_hex(config_hash) << " time=" << fmt(time)
      << "\n";
  out << "r_mid,g_hat,ci_lo,ci_hi\n";
  for (const auto& b : bins) {
    out << fmt(b.r_mid) << "," << fmt(b.g) << "," << fmt(b.ci_lo) << ","
        << fmt(b.ci_hi) << "\n";
  }
}

void write_trajectory_csv(const std::filesystem::path& path,
                          std::span<const std::array<double, 4>> rows,
                          std::uint64_t config_hash) {
  auto out = open_out(path);
  out << "# config_hash=" << hash_hex(config_hash) << "\n";
  out << "time,mean_density,min_density,max_density\n";
  for (const auto& r : rows) {
    out << fmt(r[0]) << "," << fmt(r[1]) << "," << fmt(r[2]) << "," << fmt(r[3])
        << "\n";
  }
}

void write_field(const std::filesystem::path& path, const DensityField& field) {
  json header;
  header["dim"] = field.dim;
  header["nodes"] = field.nodes;
  header["side"] = field.side;
  header["time"] = field.time;
  const std::string htext = header.dump();

  auto out = open_out(path, true);
  out.write(kFieldMagic, sizeof(kFieldMagic));
  const std::uint32_t hlen = static_cast<std::uint32_t>(htext.size());
  out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
  out.write(htext.data(), static_cast<std::streamsize>(htext.size()));
  out.write(reinterpret_cast<const char*>(field.values.data()),
            static_cast<std::streamsize>(field.values.size() * sizeof(double)));
}

DensityField read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file: " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kFieldMagic, sizeof(magic)) != 0) {
    throw std::runtime_error("field dump: bad magic in " + path.string());
  }
  std::uint32_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
  if (!in || hlen > (1u << 20)) {
    throw std::runtime_error("field dump: bad header length");
  }
  std::string htext(hlen, '\0');
  in.read(htext.data(), hlen);
  const json header = json::parse(htext);

  DensityField f;
  f.dim = header.at("dim").get<int>();
  f.nodes = header.at("nodes").get<int>();
  f.side = header.at("side").get<double>();
  f.time = header.at("time").get<double>();
  const std::size_t n = (f.dim == 1)
                            ? static_cast<std::size_t>(f.nodes)
                            : static_cast<std::size_t>(f.nodes) * f.nodes;
  f.values.resize(n);
  in.read(reinterpret_cast<char*>(f.values.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw std::runtime_error("field dump: truncated values");
  return f;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

}  // namespace migsim
