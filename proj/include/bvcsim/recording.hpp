#ifndef BVCSIM_RECORDING_HPP
#define BVCSIM_RECORDING_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bvcsim {

struct Pose;

/// Rates below this floor are not recorded.
constexpr double kRateSparsityFloor = 1e-4;

struct TraceError : std::runtime_error {
    enum class Kind { io, version, format, truncation, digest };
    TraceError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
    Kind kind;
};

struct TraceHeader {
    int version = 1;
    std::string model;
    double env_tilt_deg = 0.0;
    int n_p = 0;
    int n_b = 0;
    std::uint64_t seed = 0;
    std::string config_digest;   // hex digest of the run config
    long declared_samples = -1;  // patched on close
};

/// One recorded control step. Activations are sparse (index ascending,
/// rate > kRateSparsityFloor).
struct TraceSample {
    long step = 0;
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;
    std::vector<std::pair<int, double>> activations;
};

/// Line-oriented text trace, one sample per line:
///   step x y heading k i1:v1 ... ik:vk
/// preceded by a '#'-prefixed header block. The sample count in the header
/// is patched when the writer closes.
class TraceWriter {
public:
    TraceWriter(const std::filesystem::path& path, const TraceHeader& header);
    ~TraceWriter();

    TraceWriter(const TraceWriter&) = delete;
    TraceWriter& operator=(const TraceWriter&) = delete;

    void append(const TraceSample& sample);
    void append(long step, const Pose& pose, std::span<const double> rates);
    /// Flushes, patches the declared sample count and closes the file.
    void close();

    long samples_written() const { return samples_; }

private:
    std::ofstream out_;
    std::filesystem::path path_;
    long samples_ = 0;
    std::streampos count_pos_;
    bool closed_ = false;
};

/// Streaming reader; verifies the declared sample count at end of stream.
class TraceReader {
public:
    explicit TraceReader(const std::filesystem::path& path);

    const TraceHeader& header() const { return header_; }

    /// Next sample, or nullopt at a clean end of file. Throws TraceError on
    /// malformed lines or when the actual count differs from the header.
    std::optional<TraceSample> next();

    /// Throws TraceError{digest} unless the header digest equals `expected`.
    void require_digest(const std::string& expected) const;

private:
    std::ifstream in_;
    TraceHeader header_;
    long read_ = 0;
    bool done_ = false;
};

}  // namespace bvcsim

#endif
