#pragma once

// Command-line and config-file parsing for the quadrank tool.
//
// Config files hold `key = value` lines whose keys are long option names
// of the chosen subcommand (`height-bound = 200`). Values given on the
// command line override the file.

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace quadrank::config {

struct RunConfig {
    std::string subcommand;

    // factor / kfree
    std::string number;
    unsigned k = 2;

    // classgroup
    std::string disc;

    // gadget
    std::string places;
    std::string epsilon = "1/10";

    // fields / verify
    std::string curve;
    std::string sign = "neg";
    std::uint64_t height_bound = 0;
    std::string bad_primes = "auto";
    bool verify = false;
    unsigned m = 0;
    int rank = 0;
    std::uint64_t disc_bound = 0;
    std::size_t limit = 0;  // fields: first `limit` fields by height

    // census
    std::string form;
    int degree = -1;
    std::uint64_t x = 0;
    std::uint64_t mod = 1, a = 0, b = 0;

    // run control
    std::uint64_t first_checkpoint = 10;
    unsigned workers = 1;
    std::string cache_dir;
    std::string output;
    std::string records;
    bool resume = true;
    std::size_t halt_after = 0;  // stop gracefully after this many new checkpoints
    std::size_t kill_after = 0;  // SIGKILL self after this many new checkpoints
    std::string config_file;

    /// Every field that can change results, in a fixed order.
    nlohmann::ordered_json normalized() const;
    /// FNV-1a of normalized(), hex.
    std::string hash() const;
};

/// Parses decimal integers and exact scientific forms such as 1e12 or 2.5e3.
std::uint64_t parse_count(const std::string& text);

/// Throws usage_error on malformed or conflicting input. `help` is set
/// instead of throwing when --help is requested.
RunConfig parse_config(const std::vector<std::string>& args, std::string* help = nullptr);

}  // namespace quadrank::config
