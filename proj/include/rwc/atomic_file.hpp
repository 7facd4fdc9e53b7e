#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <system_error>

#include <unistd.h>

#include "rwc/error.hpp"
#include "rwc/hash.hpp"

namespace rwc {

/// Staging directory for partial outputs: $RWC_TMPDIR when set, else the target's directory.
inline std::filesystem::path staging_dir_for(const std::filesystem::path& target) {
    if (const char* env = std::getenv("RWC_TMPDIR"); env != nullptr && *env != '\0')
        return std::filesystem::path(env);
    auto parent = target.parent_path();
    return parent.empty() ? std::filesystem::current_path() : parent;
}

/// Writes the whole file under a temporary name and promotes it with a rename, so
/// readers never observe a partially written artifact.
inline void write_file_atomic(const std::filesystem::path& target, std::string_view content) {
    namespace fs = std::filesystem;
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const auto staging = staging_dir_for(target);
    fs::create_directories(staging);
    const auto tmp = staging / ("." + target.filename().string() + ".tmp-" +
                                std::to_string(fnv1a(fs::absolute(target).string()) ^
                                               static_cast<std::uint64_t>(::getpid())));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw FormatError("short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        // Staging on another filesystem: copy next to the target, then rename.
        const auto local = target.parent_path() / ("." + target.filename().string() + ".part");
        fs::copy_file(tmp, local, fs::copy_options::overwrite_existing);
        fs::remove(tmp);
        fs::rename(local, target);
    }
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace rwc
