#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace rrdd {

constexpr double kNoValue = std::numeric_limits<double>::quiet_NaN();

/// One outer iteration of the interface method. Reference-dependent columns
/// (err_*, mu_err, lambda_err) are NaN when no reference was supplied.
struct IterationRecord {
    int n = 0;
    double gap = kNoValue;      ///< |eta1 - eta2| in discrete L2(Gamma)
    double err_eta1 = kNoValue; ///< |eta1 - eta*| in discrete L2(Gamma)
    double err_eta2 = kNoValue;
    double err_u1 = kNoValue; ///< W^{1,p} error of u1 against the reference
    double err_u2 = kNoValue;
    double mu_err = kNoValue;     ///< |mu^n - mu|, mu^n = s eta2 + S2 eta2 on L2(Gamma)
    double lambda_err = kNoValue; ///< |lambda^n - lambda|, lambda^n = s eta2 - S2 eta2
    int newton1 = 0;
    int newton2 = 0;
};

struct RunMetadata {
    double p = 2.0;
    double r = 2.0;
    double s = 1.0;
    double h = 0.0;
    std::string preset = "custom";
    std::uint64_t seed = 0;
    double tol_gap = 0.0;
    double newton_tol = 0.0;
    std::string eta0_mode = "neumann";
    bool has_reference = false;
    double mu0_err = kNoValue; ///< initial |mu^0 - mu|
    double lambda0_err = kNoValue;
};

struct ConvergenceHistory {
    RunMetadata meta;
    std::vector<IterationRecord> records;
    bool converged = false;
    double final_gap = kNoValue;
    double flux_residual = kNoValue; ///< |S1 eta1 + S2 eta2| in the dual norm, last iterate
};

struct CertResult {
    std::string name;
    bool pass = false;
    int first_violation_n = -1;
    double worst_violation = 0.0; ///< largest positive violation found
    double final_value = kNoValue;
    double slack = 0.0;
};

/// Telescoping contraction check: |mu^{n+1} - mu| <= |lambda^n - lambda| <=
/// |mu^n - mu| for every recorded n (including n = 0 from the metadata),
/// with slack 10x the inner solver tolerance. Requires a reference run.
CertResult contraction_certificate(const ConvergenceHistory& hist);

/// Monotone pairing decay: (S_i eta_i^n - S_i eta, eta_i^n - eta) >= -slack
/// for all n and below final_tol at the last iterate. The pairings are
/// recovered from the recorded mu/lambda distances via the polarization
/// identity, so the check is a pure function of the serialized history.
CertResult monotone_gap_certificate(const ConvergenceHistory& hist, double final_tol = 1e-6);

struct DecadeRecord {
    double gap_threshold = 0.0;
    int n = -1; ///< first iteration at or below the threshold, -1 if never
};

struct ErrorDecaySummary {
    int iterations = 0;
    double final_gap = kNoValue;
    double final_err_eta1 = kNoValue;
    double final_err_eta2 = kNoValue;
    double final_err_u1 = kNoValue;
    double final_err_u2 = kNoValue;
    std::vector<DecadeRecord> decades;
};

ErrorDecaySummary error_decay_summary(const ConvergenceHistory& hist);

/// CSV with the fixed header
/// n,gap,err_eta1,err_eta2,err_u1,err_u2,mu_err,lambda_err,newton1,newton2
void write_history_csv(const ConvergenceHistory& hist, std::ostream& os);
std::vector<IterationRecord> read_history_csv(std::istream& is);

std::string metadata_json(const RunMetadata& meta);
RunMetadata metadata_from_json(const std::string& json_text);

} // namespace rrdd
