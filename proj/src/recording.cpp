#include "bvcsim/recording.hpp"

#include <cinttypes>
#include <cstdio>
#include <sstream>

#include "bvcsim/sensor.hpp"

namespace bvcsim {

namespace {
constexpr char kMagic[] = "# bvcsim-trace v";
constexpr int kCountWidth = 12;
}  // namespace

TraceWriter::TraceWriter(const std::filesystem::path& path, const TraceHeader& header)
    : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw TraceError(TraceError::Kind::io, "cannot open trace for writing: " + path.string());
    char buf[256];
    out_ << kMagic << header.version << '\n';
    out_ << "# model " << header.model << '\n';
    std::snprintf(buf, sizeof buf, "# env_tilt_deg %.9g\n", header.env_tilt_deg);
    out_ << buf;
    out_ << "# n_p " << header.n_p << '\n';
    out_ << "# n_b " << header.n_b << '\n';
    out_ << "# seed " << header.seed << '\n';
    out_ << "# digest " << header.config_digest << '\n';
    out_ << "# samples ";
    count_pos_ = out_.tellp();
    for (int i = 0; i < kCountWidth; ++i) out_ << '0';
    out_ << '\n';
}

TraceWriter::~TraceWriter() {
    try {
        close();
    } catch (...) {
        // destructor must not throw; an explicit close() reports errors
    }
}

void TraceWriter::append(const TraceSample& sample) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%ld %.9g %.9g %.9g %zu", sample.step, sample.x,
                  sample.y, sample.heading, sample.activations.size());
    out_ << buf;
    for (const auto& [idx, rate] : sample.activations) {
        std::snprintf(buf, sizeof buf, " %d:%.6g", idx, rate);
        out_ << buf;
    }
    out_ << '\n';
    if (!out_) throw TraceError(TraceError::Kind::io, "trace write failed: " + path_.string());
    ++samples_;
}

void TraceWriter::append(long step, const Pose& pose, std::span<const double> rates) {
    TraceSample s;
    s.step = step;
    s.x = pose.x;
    s.y = pose.y;
    s.heading = pose.heading;
    for (size_t i = 0; i < rates.size(); ++i) {
        if (rates[i] > kRateSparsityFloor) {
            s.activations.emplace_back(static_cast<int>(i), rates[i]);
        }
    }
    append(s);
}

void TraceWriter::close() {
    if (closed_) return;
    closed_ = true;
    out_.seekp(count_pos_);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%0*ld", kCountWidth, samples_);
    out_ << buf;
    out_.flush();
    out_.close();
    if (out_.fail()) throw TraceError(TraceError::Kind::io, "trace close failed: " + path_.string());
}

namespace {

// Header line "# key value"; returns value or throws.
std::string header_value(const std::string& line, const std::string& key,
                         const std::filesystem::path& path) {
    const std::string prefix = "# " + key + " ";
    if (line.rfind(prefix, 0) != 0) {
        throw TraceError(TraceError::Kind::format,
                         path.string() + ": expected header '" + key + "', got: " + line);
    }
    return line.substr(prefix.size());
}

}  // namespace

TraceReader::TraceReader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
    if (!in_) throw TraceError(TraceError::Kind::io, "cannot open trace: " + path.string());
    std::string line;
    if (!std::getline(in_, line) || line.rfind(kMagic, 0) != 0) {
        throw TraceError(TraceError::Kind::version, path.string() + ": not a bvcsim trace");
    }
    header_.version = std::atoi(line.c_str() + sizeof(kMagic) - 1);
    if (header_.version != 1) {
        throw TraceError(TraceError::Kind::version,
                         path.string() + ": unsupported trace version " + std::to_string(header_.version));
    }
    std::getline(in_, line);
    header_.model = header_value(line, "model", path);
    std::getline(in_, line);
    header_.env_tilt_deg = std::stod(header_value(line, "env_tilt_deg", path));
    std::getline(in_, line);
    header_.n_p = std::stoi(header_value(line, "n_p", path));
    std::getline(in_, line);
    header_.n_b = std::stoi(header_value(line, "n_b", path));
    std::getline(in_, line);
    header_.seed = std::stoull(header_value(line, "seed", path));
    std::getline(in_, line);
    header_.config_digest = header_value(line, "digest", path);
    std::getline(in_, line);
    header_.declared_samples = std::stol(header_value(line, "samples", path));
    if (!in_) throw TraceError(TraceError::Kind::format, path.string() + ": truncated header");
}

std::optional<TraceSample> TraceReader::next() {
    if (done_) return std::nullopt;
    std::string line;
    if (!std::getline(in_, line)) {
        done_ = true;
        if (read_ != header_.declared_samples) {
            throw TraceError(TraceError::Kind::truncation,
                             "trace declares " + std::to_string(header_.declared_samples) +
                                 " samples but contains " + std::to_string(read_));
        }
        return std::nullopt;
    }
    std::istringstream iss(line);
    TraceSample s;
    size_t k = 0;
    if (!(iss >> s.step >> s.x >> s.y >> s.heading >> k)) {
        throw TraceError(TraceError::Kind::format, "malformed trace line: " + line);
    }
    s.activations.reserve(k);
    int prev_idx = -1;
    for (size_t i = 0; i < k; ++i) {
        int idx = 0;
        char colon = 0;
        double rate = 0.0;
        if (!(iss >> idx >> colon >> rate) || colon != ':' || idx <= prev_idx ||
            idx >= header_.n_p) {
            throw TraceError(TraceError::Kind::format, "malformed activation entry: " + line);
        }
        prev_idx = idx;
        s.activations.emplace_back(idx, rate);
    }
    ++read_;
    return s;
}

void TraceReader::require_digest(const std::string& expected) const {
    if (header_.config_digest != expected) {
        throw TraceError(TraceError::Kind::digest,
                         "trace digest " + header_.config_digest +
                             " does not match expected " + expected);
    }
}

}  // namespace bvcsim
