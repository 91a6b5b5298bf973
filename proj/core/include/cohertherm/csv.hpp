#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace cohertherm::csv {

/// Doubles are written with 17 significant digits (%.17g semantics) and a
/// '.' decimal separator regardless of locale, so they round-trip exactly.
std::string format(double value);
std::string format(long long value);

/// Row-oriented writer: comma-separated, LF line endings, no quoting (all
/// fields are numeric or fixed identifiers).
class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void header(std::initializer_list<std::string_view> columns);
    void row(const std::vector<std::string>& fields);

private:
    std::ostream& out_;
};

/// FNV-1a 64-bit hash, used for config hashes and artifact checksums.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a_file(const std::filesystem::path& path);
std::string hex(std::uint64_t value);

}  // namespace cohertherm::csv
