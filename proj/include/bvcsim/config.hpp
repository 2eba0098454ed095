#ifndef BVCSIM_CONFIG_HPP
#define BVCSIM_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "bvcsim/agent.hpp"
#include "bvcsim/bvc.hpp"
#include "bvcsim/geometry.hpp"
#include "bvcsim/metrics.hpp"
#include "bvcsim/pcn.hpp"

namespace bvcsim {

/// Invalid or inconsistent configuration; maps to exit code 2 in the CLI.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct HexGridParams {
    int nx = 50;
    int ny = 50;
};

/// Full description of one trial. The environment and BVC blocks are derived
/// from the `model` / `env` presets and may be overridden field by field via
/// the config file.
struct RunConfig {
    ModelName model = ModelName::model_2d;
    int env = 1;  // 1..4 -> central wall tilt 0/30/45/60 degrees
    EnvironmentSpec environment;
    ModelConfig model_config;
    PcnParams pcn;
    WalkParams walk;
    int n_p = 250;
    HexGridParams hex;
    AliasingParams aliasing;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    int threads = 0;  // 0 = hardware concurrency

    /// Central wall tilt for an environment preset; throws ConfigError
    /// unless env is 1..4.
    static double env_tilt_deg(int env);

    /// Config with model/environment presets applied.
    static RunConfig make(ModelName model, int env);

    /// Validates every block; throws ConfigError with a readable message.
    void validate() const;

    /// Canonical JSON of the scientific parameters (out_dir and threads are
    /// execution details and excluded).
    std::string canonical_json() const;

    /// FNV-1a 64-bit digest of canonical_json(), 16 hex chars.
    std::string digest() const;

    /// Parses a JSON config file over the current values; unknown keys are
    /// rejected, absent keys keep their value. A "model" or "env" key applies
    /// the preset before explicit "model_config"/"environment" overrides.
    void apply_file(const std::filesystem::path& path);
    void apply_json_text(const std::string& text);

    void write_file(const std::filesystem::path& path) const;
};

}  // namespace bvcsim

#endif
