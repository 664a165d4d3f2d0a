#include "rrdd/diagnostics.hpp"

#include "rrdd/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace rrdd {

namespace {

void require_reference(const ConvergenceHistory& hist, const char* who)
{
    if (!hist.meta.has_reference || !std::isfinite(hist.meta.mu0_err) ||
        !std::isfinite(hist.meta.lambda0_err)) {
        throw Error(std::string(who) + ": history lacks the reference quantities");
    }
    for (const IterationRecord& rec : hist.records) {
        if (!std::isfinite(rec.mu_err) || !std::isfinite(rec.lambda_err)) {
            throw Error(std::string(who) + ": history lacks mu/lambda distances");
        }
    }
}

struct ViolationTracker {
    int first_n = -1;
    double worst = 0.0;

    void check(double violation, int n)
    {
        if (violation > 0.0 && first_n < 0) {
            first_n = n;
        }
        worst = std::max(worst, violation);
    }
};

} // namespace

CertResult contraction_certificate(const ConvergenceHistory& hist)
{
    require_reference(hist, "contraction_certificate");

    CertResult cert;
    cert.name = "contraction";
    cert.slack = 10.0 * hist.meta.newton_tol;

    // mu/lambda sequences with n = 0 taken from the metadata.
    ViolationTracker t;
    double mu_prev = hist.meta.mu0_err;
    double lambda_prev = hist.meta.lambda0_err;
    for (const IterationRecord& rec : hist.records) {
        // lambda^{n-1} bounded by mu^{n-1}
        t.check(lambda_prev - mu_prev - cert.slack, rec.n - 1);
        // mu^n bounded by lambda^{n-1}
        t.check(rec.mu_err - lambda_prev - cert.slack, rec.n);
        mu_prev = rec.mu_err;
        lambda_prev = rec.lambda_err;
    }
    t.check(lambda_prev - mu_prev - cert.slack,
            hist.records.empty() ? 0 : hist.records.back().n);

    cert.first_violation_n = t.first_n;
    cert.worst_violation = t.worst;
    cert.pass = t.first_n < 0;
    cert.final_value = hist.records.empty() ? hist.meta.mu0_err : hist.records.back().mu_err;
    return cert;
}

CertResult monotone_gap_certificate(const ConvergenceHistory& hist, double final_tol)
{
    require_reference(hist, "monotone_gap_certificate");

    CertResult cert;
    cert.name = "monotone_gap";
    cert.slack = 10.0 * hist.meta.newton_tol;
    const double s = hist.meta.s;

    // Polarization: with mu^n - mu = s(e2) + d2 and lambda^n - lambda =
    // s(e2) - d2, the pairing (S_2 eta_2^n - S_2 eta, eta_2^n - eta) equals
    // (|mu^n - mu|^2 - |lambda^n - lambda|^2) / (4 s); side 1 pairs
    // lambda^{n-1} with mu^n.
    ViolationTracker t;
    double pair1 = 0.0, pair2 = 0.0;
    double lambda_prev = hist.meta.lambda0_err;
    pair2 = (hist.meta.mu0_err * hist.meta.mu0_err -
             hist.meta.lambda0_err * hist.meta.lambda0_err) /
            (4.0 * s);
    t.check(-pair2 - cert.slack, 0);
    for (const IterationRecord& rec : hist.records) {
        pair1 = (lambda_prev * lambda_prev - rec.mu_err * rec.mu_err) / (4.0 * s);
        pair2 = (rec.mu_err * rec.mu_err - rec.lambda_err * rec.lambda_err) / (4.0 * s);
        t.check(-pair1 - cert.slack, rec.n);
        t.check(-pair2 - cert.slack, rec.n);
        lambda_prev = rec.lambda_err;
    }

    cert.final_value = std::max(pair1, pair2);
    const bool decayed = hist.records.empty() || cert.final_value <= final_tol;
    if (!decayed && t.first_n < 0) {
        t.first_n = hist.records.back().n;
        t.worst = cert.final_value - final_tol;
    }
    cert.first_violation_n = t.first_n;
    cert.worst_violation = t.worst;
    cert.pass = t.first_n < 0;
    return cert;
}

ErrorDecaySummary error_decay_summary(const ConvergenceHistory& hist)
{
    ErrorDecaySummary summary;
    summary.iterations = static_cast<int>(hist.records.size());
    if (hist.records.empty()) {
        return summary;
    }
    const IterationRecord& last = hist.records.back();
    summary.final_gap = last.gap;
    summary.final_err_eta1 = last.err_eta1;
    summary.final_err_eta2 = last.err_eta2;
    summary.final_err_u1 = last.err_u1;
    summary.final_err_u2 = last.err_u2;

    const double gap0 = hist.records.front().gap;
    if (gap0 > 0.0) {
        for (int decade = 1; decade <= 16; ++decade) {
            const double threshold = gap0 * std::pow(10.0, -decade);
            DecadeRecord rec{threshold, -1};
            for (const IterationRecord& it : hist.records) {
                if (it.gap <= threshold) {
                    rec.n = it.n;
                    break;
                }
            }
            if (rec.n < 0) {
                break;
            }
            summary.decades.push_back(rec);
        }
    }
    return summary;
}

namespace {

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void write_history_csv(const ConvergenceHistory& hist, std::ostream& os)
{
    os << "n,gap,err_eta1,err_eta2,err_u1,err_u2,mu_err,lambda_err,newton1,newton2\n";
    for (const IterationRecord& rec : hist.records) {
        os << rec.n << ',' << fmt(rec.gap) << ',' << fmt(rec.err_eta1) << ','
           << fmt(rec.err_eta2) << ',' << fmt(rec.err_u1) << ',' << fmt(rec.err_u2) << ','
           << fmt(rec.mu_err) << ',' << fmt(rec.lambda_err) << ',' << rec.newton1 << ','
           << rec.newton2 << '\n';
    }
}

std::vector<IterationRecord> read_history_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line)) {
        throw Error("read_history_csv: empty stream");
    }
    if (line.rfind("n,gap,", 0) != 0) {
        throw Error("read_history_csv: unexpected header: " + line);
    }
    std::vector<IterationRecord> records;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream ls(line);
        std::string tok;
        std::vector<std::string> cols;
        while (std::getline(ls, tok, ',')) {
            cols.push_back(tok);
        }
        if (cols.size() != 10) {
            throw Error("read_history_csv: malformed row: " + line);
        }
        IterationRecord rec;
        rec.n = std::stoi(cols[0]);
        rec.gap = std::stod(cols[1]);
        rec.err_eta1 = std::stod(cols[2]);
        rec.err_eta2 = std::stod(cols[3]);
        rec.err_u1 = std::stod(cols[4]);
        rec.err_u2 = std::stod(cols[5]);
        rec.mu_err = std::stod(cols[6]);
        rec.lambda_err = std::stod(cols[7]);
        rec.newton1 = std::stoi(cols[8]);
        rec.newton2 = std::stoi(cols[9]);
        records.push_back(rec);
    }
    return records;
}

std::string metadata_json(const RunMetadata& meta)
{
    nlohmann::json j;
    j["p"] = meta.p;
    j["r"] = meta.r;
    j["s"] = meta.s;
    j["h"] = meta.h;
    j["preset"] = meta.preset;
    j["seed"] = meta.seed;
    j["tol_gap"] = meta.tol_gap;
    j["newton_tol"] = meta.newton_tol;
    j["eta0_mode"] = meta.eta0_mode;
    j["has_reference"] = meta.has_reference;
    j["mu0_err"] = meta.mu0_err;
    j["lambda0_err"] = meta.lambda0_err;
    return j.dump(2);
}

RunMetadata metadata_from_json(const std::string& json_text)
{
    nlohmann::json j = nlohmann::json::parse(json_text);
    if (j.contains("run")) {
        j = j["run"];
    }
    RunMetadata meta;
    meta.p = j.at("p").get<double>();
    meta.r = j.at("r").get<double>();
    meta.s = j.at("s").get<double>();
    meta.h = j.at("h").get<double>();
    meta.preset = j.at("preset").get<std::string>();
    meta.seed = j.at("seed").get<std::uint64_t>();
    meta.tol_gap = j.at("tol_gap").get<double>();
    meta.newton_tol = j.at("newton_tol").get<double>();
    meta.eta0_mode = j.value("eta0_mode", std::string("neumann"));
    meta.has_reference = j.at("has_reference").get<bool>();
    // NaN round-trips as JSON null
    auto number_or_nan = [&](const char* key) {
        return j.contains(key) && j[key].is_number() ? j[key].get<double>() : kNoValue;
    };
    meta.mu0_err = number_or_nan("mu0_err");
    meta.lambda0_err = number_or_nan("lambda0_err");
    return meta;
}

} // namespace rrdd
