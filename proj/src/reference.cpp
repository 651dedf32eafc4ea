#include "hdes/reference.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>

#include "hdes/error.hpp"

namespace hdes {

namespace {

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& s, std::size_t row) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ContractError("reference table row " + std::to_string(row) + ": '" + s + "' is not a number");
    return v;
}

// "f_d1_0" -> ("f", (1,0)); plain names are value columns.
std::pair<std::string, MultiIndex> parse_column(const std::string& col, std::size_t dims) {
    const auto pos = col.rfind("_d");
    if (pos != std::string::npos && pos > 0) {
        std::vector<int> counts;
        std::stringstream ss(col.substr(pos + 2));
        std::string part;
        bool ok = true;
        while (std::getline(ss, part, '_')) {
            if (part.empty() || !std::all_of(part.begin(), part.end(), ::isdigit)) {
                ok = false;
                break;
            }
            counts.push_back(std::stoi(part));
        }
        if (ok && counts.size() == dims) return {col.substr(0, pos), MultiIndex(std::move(counts))};
    }
    return {col, MultiIndex::zero(dims)};
}

struct Table {
    std::vector<Point> points;
    std::map<std::pair<std::string, MultiIndex>, std::vector<double>> columns;
};

}  // namespace

std::string to_string(ReferenceKind k) {
    switch (k) {
        case ReferenceKind::ClosedForm: return "closed-form";
        case ReferenceKind::Rk4: return "rk4";
        case ReferenceKind::Tabulated: return "tabulated";
    }
    return "closed-form";
}

const ReferenceFunction* ReferenceSolution::find(const std::string& name) const {
    for (const auto& f : functions)
        if (f.name == name) return &f;
    return nullptr;
}

std::string column_name(const std::string& function, const MultiIndex& mi) {
    if (mi.is_zero()) return function;
    std::string s = function + "_d";
    for (std::size_t j = 0; j < mi.size(); ++j) s += (j ? "_" : "") + std::to_string(mi[j]);
    return s;
}

ReferenceSolution tabulated_reference(const std::string& csv_text, const std::vector<std::string>& coordinates) {
    std::stringstream in(csv_text);
    std::string line;
    std::vector<std::string> header;
    while (header.empty() && std::getline(in, line)) {
        line = trim(line);
        if (!line.empty()) header = split(line);
    }
    const std::size_t dims = coordinates.size();
    if (header.size() <= dims) throw ContractError("reference table has no value columns");
    for (std::size_t j = 0; j < dims; ++j)
        if (header[j] != coordinates[j])
            throw ContractError("reference table column " + std::to_string(j + 1) + " must be '" + coordinates[j] +
                                "', found '" + header[j] + "'");

    auto table = std::make_shared<Table>();
    std::vector<std::pair<std::string, MultiIndex>> keys;
    for (std::size_t j = dims; j < header.size(); ++j) {
        keys.push_back(parse_column(header[j], dims));
        if (table->columns.count(keys.back())) throw ContractError("duplicate reference column '" + header[j] + "'");
        table->columns[keys.back()];
    }
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        line = trim(line);
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != header.size())
            throw ContractError("reference table row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                                " cells, expected " + std::to_string(header.size()));
        Point p;
        for (std::size_t j = 0; j < dims; ++j) p.push_back(parse_number(cells[j], row));
        table->points.push_back(std::move(p));
        for (std::size_t j = dims; j < header.size(); ++j)
            table->columns[keys[j - dims]].push_back(parse_number(cells[j], row));
    }
    if (table->points.empty()) throw ContractError("reference table has no rows");

    std::vector<std::size_t> order(table->points.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    if (dims == 1)
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return table->points[a][0] < table->points[b][0]; });

    ReferenceSolution ref;
    ref.kind = ReferenceKind::Tabulated;
    std::map<std::string, std::size_t> index;
    for (const auto& key : keys) {
        auto [it, inserted] = index.emplace(key.first, ref.functions.size());
        if (inserted) ref.functions.push_back({key.first, {}, {}});
        ReferenceFunction& rf = ref.functions[it->second];
        rf.orders.insert(key.second);
        const std::string name = key.first;
        rf.eval = [table, order, name, dims](std::span<const double> x, const MultiIndex& mi) {
            const auto col = table->columns.find({name, mi});
            if (col == table->columns.end())
                throw ContractError("reference has no column for " + column_name(name, mi));
            if (x.size() != dims) throw ContractError("reference lookup with wrong dimension");
            const auto& pts = table->points;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                bool match = true;
                for (std::size_t j = 0; j < dims && match; ++j) match = std::fabs(pts[i][j] - x[j]) <= 1e-12;
                if (match) return col->second[i];
            }
            if (dims != 1) throw ContractError("reference table has no row at the requested point");
            const double lo = pts[order.front()][0], hi = pts[order.back()][0];
            if (x[0] < lo || x[0] > hi) throw ContractError("reference table does not cover x = " + format_double(x[0]));
            std::size_t k = 1;
            while (pts[order[k]][0] < x[0]) ++k;
            const std::size_t a = order[k - 1], b = order[k];
            const double t = (x[0] - pts[a][0]) / (pts[b][0] - pts[a][0]);
            return (1.0 - t) * col->second[a] + t * col->second[b];
        };
    }
    return ref;
}

}  // namespace hdes
