#pragma once

#include <optional>
#include <string>
#include <vector>

namespace attrest {

/// One documented divergence between the published derivation this toolkit
/// implements and what re-derivation (or the published tables themselves)
/// supports. Entries tied to a bundled dataset row also carry the published
/// table value and its reconciliation status.
struct LedgerEntry {
    std::string id;          // stable slug, e.g. "eq-3.7-weights"
    std::string anchor;      // source anchor, e.g. "(3.7)"
    std::string issue;       // what the source prints
    std::string resolution;  // what this library computes instead
    std::string evidence;    // numeric validation status

    // Optional link to a reference-table row.
    std::string dataset_tag;              // "rice73" / "wheat34"
    std::string estimator;                // grammar label of the affected row
    std::string params;                   // parameter list of that row ("" = any)
    std::optional<double> published_mse;  // value printed in the source table
    std::string status;                   // "reconciled", "unreconciled",
                                          // "reconciled-as-tabulated", ""
};

/// The full corrections ledger. Evidence fields are computed live from the
/// bundled dataset summaries, so the printed numbers always match what the
/// theory code produces.
const std::vector<LedgerEntry>& corrections_ledger();

std::string ledger_text();
std::string ledger_csv();

// Bundled reference dataset summaries (also shipped as files under data/).
namespace datasets {
struct Bundled {
    const char* tag;
    std::int64_t n_units;
    double mean_y, p1, p2, var_y, var_phi1, var_phi2, rho_pb1, rho_pb2, rho_phi;
    std::int64_t default_n;
    std::int64_t default_n_prime;  // 0 = single-phase dataset
};

/// Rice production across 73 districts of Pakistan (Government of
/// Pakistan, 2004). Single-phase reference; default n = 15 recovers the
/// published Var(ybar).
const Bundled& rice73();

/// 34 wheat farms in 34 Indian villages (Singh & Chaudhary, 1986, p.177).
/// Two-phase reference; defaults n = 10, n' = 25 recover the published
/// Var(ybar) and are confirmed by the d-ratio1 row.
const Bundled& wheat34();
}  // namespace datasets

}  // namespace attrest
