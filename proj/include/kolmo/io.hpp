#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kolmo/coeffs.hpp"
#include "kolmo/linalg.hpp"
#include "kolmo/mesh.hpp"

namespace kolmo {

/// Shortest round-trip-safe fixed format used in every output file ("%.17g").
std::string format_real(double v);

/// Writes `content` to `path` through a temporary file in the same directory
/// followed by a rename, so readers never observe a partial file.
void write_atomic(const std::string& path, const std::string& content);

class CsvTable
{
public:
    explicit CsvTable(std::vector<std::string> header);

    CsvTable& row();
    CsvTable& add(double v);
    CsvTable& add(long long v);
    CsvTable& add(int v) { return add(static_cast<long long>(v)); }
    CsvTable& add(const std::string& v);

    const std::vector<std::string>& header() const { return header_; }
    std::size_t rows() const { return rows_.size(); }
    std::string str() const;
    void write(const std::string& path) const { write_atomic(path, str()); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Coefficient dump: T-index, h_T, sigma_T, tau, delta, alpha, beta, gamma.
CsvTable coeffs_table(const Mesh& mesh, const CoeffSet& cs);

std::string matrix_market(const SpMat& m);
void write_matrix_market(const SpMat& m, const std::string& path);

void write_json(const nlohmann::json& j, const std::string& path);

} // namespace kolmo
