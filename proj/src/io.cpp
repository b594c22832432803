#include "critwave/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "critwave/errors.hpp"
#include "critwave/util.hpp"

namespace critwave {

namespace {

constexpr char kCheckpointMagic[8] = {'c', 'w', 'c', 'k', 'p', 't', '0', '1'};

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw Error("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw Error("cannot open for reading: " + path.string());
  return in;
}

std::vector<double> parse_csv_row(const std::string& line,
                                  const std::filesystem::path& path) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) comma = line.size();
    double value = 0.0;
    auto [ptr, ec] =
        std::from_chars(line.data() + pos, line.data() + comma, value);
    if (ec != std::errc{} || ptr != line.data() + comma) {
      throw ParseError("bad CSV number in " + path.string() + ": '" +
                       line.substr(pos, comma - pos) + "'");
    }
    out.push_back(value);
    pos = comma + 1;
    if (comma == line.size()) break;
  }
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw Error("double formatting failed");
  return std::string(buf, ptr);
}

nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in = open_in(path, false);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("bad JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

void save_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out = open_out(path, false);
  out << j.dump(2) << '\n';
}

void write_snapshot_csv(const std::filesystem::path& path,
                        const FieldState& state) {
  std::ofstream out = open_out(path, false);
  out << "r,v,v_t,u,u_t\n";
  for (int j = 0; j <= state.grid.n_cells; ++j) {
    double r = state.grid.r(j);
    double w = j == 0 ? 0.0 : ipow(r, state.k);
    out << format_double(r) << ',' << format_double(state.v[j]) << ','
        << format_double(state.v_t[j]) << ',' << format_double(w * state.v[j])
        << ',' << format_double(w * state.v_t[j]) << '\n';
  }
}

FieldState read_snapshot_csv(const std::filesystem::path& path, int k) {
  std::ifstream in = open_in(path, false);
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError("empty snapshot file: " + path.string());
  }
  std::vector<double> r, v, vt;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row = parse_csv_row(line, path);
    if (row.size() < 3) {
      throw ParseError("snapshot row needs at least r,v,v_t in " +
                       path.string());
    }
    r.push_back(row[0]);
    v.push_back(row[1]);
    vt.push_back(row[2]);
  }
  if (r.size() < 2 || r.front() != 0.0) {
    throw ParseError("snapshot grid must start at r = 0: " + path.string());
  }
  double h = r[1] - r[0];
  for (std::size_t j = 0; j + 1 < r.size(); ++j) {
    if (std::abs(r[j + 1] - r[j] - h) > 1e-9 * std::max(1.0, h)) {
      throw ParseError("snapshot grid is not uniform: " + path.string());
    }
  }
  FieldState state;
  state.grid.n_cells = static_cast<int>(r.size()) - 1;
  state.grid.h = h;
  state.k = k;
  state.v = std::move(v);
  state.v_t = std::move(vt);
  state.validate();
  return state;
}

void write_checkpoint(const std::filesystem::path& path,
                      const FieldState& state) {
  std::ofstream out = open_out(path, true);
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  std::int64_t n = state.grid.n_cells;
  std::int64_t k = state.k;
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(&k), sizeof(k));
  out.write(reinterpret_cast<const char*>(&state.grid.h),
            sizeof(state.grid.h));
  out.write(reinterpret_cast<const char*>(&state.t), sizeof(state.t));
  out.write(reinterpret_cast<const char*>(state.v.data()),
            static_cast<std::streamsize>(state.v.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(state.v_t.data()),
            static_cast<std::streamsize>(state.v_t.size() * sizeof(double)));
}

FieldState read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in = open_in(path, true);
  char magic[sizeof(kCheckpointMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw ParseError("not a checkpoint file: " + path.string());
  }
  std::int64_t n = 0;
  std::int64_t k = 0;
  FieldState state;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  in.read(reinterpret_cast<char*>(&k), sizeof(k));
  in.read(reinterpret_cast<char*>(&state.grid.h), sizeof(state.grid.h));
  in.read(reinterpret_cast<char*>(&state.t), sizeof(state.t));
  if (!in || n < 1 || n > (1 << 28) || k < 1 || k > 8) {
    throw ParseError("corrupt checkpoint header: " + path.string());
  }
  state.grid.n_cells = static_cast<int>(n);
  state.k = static_cast<int>(k);
  state.v.resize(state.grid.size());
  state.v_t.resize(state.grid.size());
  in.read(reinterpret_cast<char*>(state.v.data()),
          static_cast<std::streamsize>(state.v.size() * sizeof(double)));
  in.read(reinterpret_cast<char*>(state.v_t.data()),
          static_cast<std::streamsize>(state.v_t.size() * sizeof(double)));
  if (!in) throw ParseError("truncated checkpoint: " + path.string());
  state.validate();
  return state;
}

void write_series_csv(const std::filesystem::path& path,
                      const RunRecord& record) {
  std::ofstream out = open_out(path, false);
  out << "t,E,E_kin,sup_u,sup_vr";
  for (double R : record.diagnostics.tail_radii) {
    out << ",tail@" << format_double(R);
  }
  out << ",virial1,virial2,virial_main1,virial_main2,virial_tail,snorm_acc\n";
  for (const SeriesRow& row : record.series) {
    out << format_double(row.t) << ',' << format_double(row.e_total) << ','
        << format_double(row.e_kinetic) << ',' << format_double(row.sup_u)
        << ',' << format_double(row.sup_vr);
    for (double tail : row.tails) out << ',' << format_double(tail);
    out << ',' << format_double(row.virial1) << ','
        << format_double(row.virial2) << ','
        << format_double(row.virial_main1) << ','
        << format_double(row.virial_main2) << ','
        << format_double(row.virial_tail) << ','
        << format_double(row.snorm_acc) << '\n';
  }
}

void write_profile_csv(const std::filesystem::path& path,
                       const HarmonicMapProfile& profile) {
  std::ofstream out = open_out(path, false);
  out << "r,Q,dQ_ds\n";
  for (std::size_t j = 0; j < profile.q.size(); ++j) {
    double s = profile.s_min + static_cast<double>(j) * profile.ds;
    out << format_double(std::exp(s)) << ',' << format_double(profile.q[j])
        << ',' << format_double(profile.dq[j]) << '\n';
  }
}

}  // namespace critwave
