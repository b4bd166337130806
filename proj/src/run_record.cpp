#include "aqc/run_record.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace aqc {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

bool record_has_fidelity(const RunRecord& record) {
    for (const auto& row : record.rows)
        if (row.fidelity) return true;
    return false;
}

void write_header_comment(std::ostream& os, const ArtifactInfo& info) {
    os << "# aqc " << info.version << " config_hash=" << info.config_hash << "\n";
}

}  // namespace

void write_record_row_csv(std::ostream& os, const RunRow& row, bool with_fidelity) {
    os << row.iteration << ',' << format_double(row.cost) << ','
       << format_double(row.weight) << ',' << format_double(row.grad_norm);
    if (with_fidelity) {
        os << ',';
        if (row.fidelity) os << format_double(*row.fidelity);
    }
    os << '\n';
}

std::string record_csv_header(const RunRecord& record, const ArtifactInfo& info) {
    std::string out = "# aqc " + info.version + " config_hash=" + info.config_hash + "\n";
    out += "iteration,cost,weight,grad_norm";
    if (record_has_fidelity(record)) out += ",fidelity";
    out += "\n";
    return out;
}

void write_record_csv(std::ostream& os, const RunRecord& record, const ArtifactInfo& info) {
    os << record_csv_header(record, info);
    bool with_fidelity = record_has_fidelity(record);
    for (const auto& row : record.rows) write_record_row_csv(os, row, with_fidelity);
}

void write_record_jsonl(std::ostream& os, const RunRecord& record, const ArtifactInfo& info) {
    for (const auto& row : record.rows) {
        nlohmann::json obj;
        obj["iteration"] = row.iteration;
        obj["cost"] = row.cost;
        obj["weight"] = row.weight;
        obj["grad_norm"] = row.grad_norm;
        if (row.fidelity) obj["fidelity"] = *row.fidelity;
        obj["wall_ms"] = row.wall_ms;
        obj["version"] = info.version;
        obj["config_hash"] = info.config_hash;
        os << obj.dump() << '\n';
    }
}

std::string record_summary_json(const RunRecord& record, const ArtifactInfo& info) {
    nlohmann::json doc;
    doc["version"] = info.version;
    doc["config_hash"] = info.config_hash;
    doc["rows"] = record.rows.size();
    doc["best_cost"] = record.best_cost;
    doc["final_cost"] = record.final_cost;
    if (record.final_fidelity) doc["final_fidelity"] = *record.final_fidelity;
    doc["stalled"] = record.stalled;
    doc["degenerate_surrogate_events"] = record.degenerate_surrogate_events;
    if (!record.weight_scaling.empty()) doc["weight_scaling"] = record.weight_scaling;
    return doc.dump(2);
}

void write_comparison_csv(std::ostream& os, const RunRecord& a, const std::string& label_a,
                          const RunRecord& b, const std::string& label_b,
                          const ArtifactInfo& info) {
    write_header_comment(os, info);
    bool fid_a = record_has_fidelity(a);
    bool fid_b = record_has_fidelity(b);
    os << "iteration,cost_" << label_a << ",cost_" << label_b;
    if (fid_a) os << ",fidelity_" << label_a;
    if (fid_b) os << ",fidelity_" << label_b;
    os << '\n';

    std::map<std::uint64_t, std::pair<const RunRow*, const RunRow*>> merged;
    for (const auto& row : a.rows) merged[row.iteration].first = &row;
    for (const auto& row : b.rows) merged[row.iteration].second = &row;
    for (const auto& [iter, rows] : merged) {
        os << iter << ',';
        if (rows.first) os << format_double(rows.first->cost);
        os << ',';
        if (rows.second) os << format_double(rows.second->cost);
        if (fid_a) {
            os << ',';
            if (rows.first && rows.first->fidelity)
                os << format_double(*rows.first->fidelity);
        }
        if (fid_b) {
            os << ',';
            if (rows.second && rows.second->fidelity)
                os << format_double(*rows.second->fidelity);
        }
        os << '\n';
    }
}

void emit_convergence(const RunRecord& record, const std::string& dir,
                      const std::string& stem, const ArtifactInfo& info) {
    if (record.rows.empty())
        throw std::invalid_argument("cannot emit an empty run record");
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    {
        std::ofstream csv(fs::path(dir) / (stem + ".csv"));
        if (!csv) throw std::runtime_error("cannot write convergence CSV under " + dir);
        write_record_csv(csv, record, info);
    }
    {
        std::ofstream json(fs::path(dir) / (stem + ".json"));
        if (!json) throw std::runtime_error("cannot write convergence summary under " + dir);
        json << record_summary_json(record, info) << '\n';
    }
}

}  // namespace aqc
