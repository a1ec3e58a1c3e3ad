#include "tsl/harness/archive.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "tsl/harness/config.hpp"

namespace tsl::harness {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little,
              "weights.bin is little-endian; big-endian hosts need byte swaps");

namespace {

constexpr char kMagic[8] = {'T', 'S', 'L', 'W', '0', '0', '0', '1'};

std::string join(const std::string& dir, const char* name) {
  return (fs::path(dir) / name).string();
}

}  // namespace

void write_trajectory_archive(const Trajectory& traj, const std::string& dir,
                              const ArchiveInfo& info) {
  traj.validate();
  if (traj.checkpoints() == 0) {
    throw ValidationError("write_trajectory_archive: empty trajectory");
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create archive directory " + dir + ": " + ec.message());
  }

  KeyValueDoc manifest;
  manifest.set_int("dimension", traj.dim());
  manifest.set_int("checkpoints", static_cast<long long>(traj.checkpoints()));
  manifest.set("time_unit", info.time_unit);
  if (info.warm_start_index) {
    manifest.set_int("warm_start_index",
                     static_cast<long long>(*info.warm_start_index));
  }
  {
    std::ofstream out(join(dir, "manifest.txt"), std::ios::trunc);
    if (!out) throw IoError("cannot write manifest.txt in " + dir);
    out << manifest.serialize();
  }
  {
    std::ofstream out(join(dir, "metrics.csv"), std::ios::trunc);
    if (!out) throw IoError("cannot write metrics.csv in " + dir);
    out << "time,loss\n";
    for (std::size_t i = 0; i < traj.checkpoints(); ++i) {
      out << format_double(traj.times[i]) << "," << format_double(traj.losses[i])
          << "\n";
    }
  }
  {
    std::ofstream out(join(dir, "weights.bin"), std::ios::trunc | std::ios::binary);
    if (!out) throw IoError("cannot write weights.bin in " + dir);
    out.write(kMagic, sizeof(kMagic));
    for (const auto& w : traj.weights) {
      out.write(reinterpret_cast<const char*>(w.data()),
                static_cast<std::streamsize>(sizeof(double) * w.size()));
    }
  }
}

Trajectory ingest_trajectory(const std::string& dir, ArchiveInfo* info_out) {
  if (!fs::is_directory(dir)) {
    throw IoError("trajectory archive not found: " + dir);
  }
  KeyValueDoc manifest;
  long long d = 0, m = 0;
  try {
    manifest = KeyValueDoc::parse_file(join(dir, "manifest.txt"));
    manifest.require_keys({"dimension", "checkpoints"});
    d = manifest.get_int("dimension");
    m = manifest.get_int("checkpoints");
  } catch (const ConfigError& e) {
    throw IoError(std::string("malformed archive manifest: ") + e.what());
  }
  if (d < 1 || m < 1) {
    throw ValidationError("manifest.txt: dimension and checkpoints must be >= 1");
  }
  if (info_out) {
    info_out->time_unit = manifest.get_string_or("time_unit", "continuum");
    if (manifest.has("warm_start_index")) {
      long long w = 0;
      try {
        w = manifest.get_int("warm_start_index");
      } catch (const ConfigError& e) {
        throw IoError(std::string("malformed archive manifest: ") + e.what());
      }
      if (w < 0 || w >= m) {
        throw ValidationError("manifest.txt: warm_start_index out of range");
      }
      info_out->warm_start_index = static_cast<std::size_t>(w);
    } else {
      info_out->warm_start_index.reset();
    }
  }

  Trajectory traj;
  traj.times.reserve(static_cast<std::size_t>(m));
  traj.losses.reserve(static_cast<std::size_t>(m));

  // metrics.csv -- errors carry the byte offset of the offending line
  {
    const std::string path = join(dir, "metrics.csv");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    std::size_t offset = 0;
    auto fail = [&](const std::string& what) {
      std::ostringstream msg;
      msg << path << ": " << what << " at byte offset " << offset;
      throw IoError(msg.str());
    };
    if (!std::getline(in, line)) fail("missing header");
    if (line != "time,loss") fail("expected header `time,loss`");
    offset += line.size() + 1;
    while (std::getline(in, line)) {
      if (line.empty()) {
        offset += 1;
        continue;
      }
      const std::size_t comma = line.find(',');
      if (comma == std::string::npos) fail("expected `time,loss` row");
      try {
        std::size_t pos = 0;
        const std::string t_str = line.substr(0, comma);
        const std::string l_str = line.substr(comma + 1);
        const double t = std::stod(t_str, &pos);
        if (pos != t_str.size()) fail("malformed time field");
        pos = 0;
        const double l = std::stod(l_str, &pos);
        if (pos != l_str.size()) fail("malformed loss field");
        traj.times.push_back(t);
        traj.losses.push_back(l);
      } catch (const IoError&) {
        throw;
      } catch (const std::exception&) {
        fail("malformed numeric field");
      }
      offset += line.size() + 1;
    }
    if (traj.times.size() != static_cast<std::size_t>(m)) {
      std::ostringstream msg;
      msg << path << ": manifest promises " << m << " checkpoints, found "
          << traj.times.size();
      throw IoError(msg.str());
    }
  }

  // weights.bin -- magic plus m*d doubles
  {
    const std::string path = join(dir, "weights.bin");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    char magic[sizeof(kMagic)];
    in.read(magic, sizeof(magic));
    if (in.gcount() != sizeof(magic) ||
        std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
      throw IoError(path + ": bad magic header (expected TSLW0001)");
    }
    const std::uintmax_t payload = fs::file_size(path) - sizeof(kMagic);
    const std::uintmax_t expected = static_cast<std::uintmax_t>(m) *
                                    static_cast<std::uintmax_t>(d) *
                                    sizeof(double);
    if (payload != expected) {
      std::ostringstream msg;
      msg << path << ": weights block holds " << payload << " bytes, expected "
          << expected << " (" << m << " x " << d << " doubles)";
      throw IoError(msg.str());
    }
    traj.weights.resize(static_cast<std::size_t>(m));
    for (auto& w : traj.weights) {
      w.resize(d);
      in.read(reinterpret_cast<char*>(w.data()),
              static_cast<std::streamsize>(sizeof(double) * d));
      if (in.gcount() != static_cast<std::streamsize>(sizeof(double) * d)) {
        throw IoError(path + ": short read in weights block");
      }
    }
  }

  traj.validate();
  return traj;
}

}  // namespace tsl::harness
