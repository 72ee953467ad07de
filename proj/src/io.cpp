#include "kolmo/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kolmo/error.hpp"

namespace kolmo {

std::string format_real(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_atomic(const std::string& path, const std::string& content)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path())
        fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out)
            throw Error("write to " + tmp.string() + " failed");
    }
    fs::rename(tmp, target);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::row()
{
    rows_.emplace_back();
    return *this;
}

CsvTable& CsvTable::add(double v)
{
    rows_.back().push_back(format_real(v));
    return *this;
}

CsvTable& CsvTable::add(long long v)
{
    rows_.back().push_back(std::to_string(v));
    return *this;
}

CsvTable& CsvTable::add(const std::string& v)
{
    rows_.back().push_back(v);
    return *this;
}

std::string CsvTable::str() const
{
    std::ostringstream os;
    auto line = [&os](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            os << (i ? "," : "") << cells[i];
        os << '\n';
    };
    line(header_);
    for (const auto& r : rows_) {
        if (r.size() != header_.size())
            throw Error("csv: row width does not match header");
        line(r);
    }
    return os.str();
}

CsvTable coeffs_table(const Mesh& mesh, const CoeffSet& cs)
{
    CsvTable t({"T", "h_T", "sigma_T", "tau", "delta", "alpha", "beta", "gamma"});
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto i = static_cast<std::size_t>(e);
        t.row().add(e).add(mesh.element(e).h).add(cs.sigma[i]);
        if (cs.tau.empty()) {
            t.add(std::string("nan")).add(std::string("nan")).add(std::string("nan")).add(std::string("nan")).add(std::string("nan"));
            continue;
        }
        t.add(cs.tau[i]).add(cs.delta[i]).add(cs.a[i].alpha).add(cs.a[i].beta).add(cs.a[i].gamma);
    }
    return t;
}

std::string matrix_market(const SpMat& m)
{
    std::ostringstream os;
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
    for (int k = 0; k < m.outerSize(); ++k)
        for (SpMat::InnerIterator it(m, k); it; ++it)
            os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << format_real(it.value()) << '\n';
    return os.str();
}

void write_matrix_market(const SpMat& m, const std::string& path)
{
    write_atomic(path, matrix_market(m));
}

void write_json(const nlohmann::json& j, const std::string& path)
{
    write_atomic(path, j.dump(2) + "\n");
}

} // namespace kolmo
