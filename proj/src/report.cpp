#include "pinsep/report.hpp"

#include "pinsep/endalg.hpp"
#include "pinsep/towers.hpp"

namespace pinsep {

LegView resolve_leg(const InputDocument& doc, const std::string& leg) {
    auto resolve = [&](const std::string& name) -> Subalgebra {
        if (name == "C") return full_subalgebra(*doc.algebra);
        if (name == "k" || name == "Fp") return prime_subalgebra(*doc.algebra);
        if (const Subalgebra* s = doc.find_subring(name)) return *s;
        fail_pre("unknown subring '" + name + "'");
    };
    LegView v;
    size_t colon = leg.find(':');
    if (colon == std::string::npos) fail_pre("--leg must look like X:Y");
    v.lower_name = leg.substr(0, colon);
    v.upper_name = leg.substr(colon + 1);
    v.lower = resolve(v.lower_name);
    v.upper = resolve(v.upper_name);
    Subalgebra probe = v.upper;
    if (!probe.contains_subalgebra(v.lower)) fail_pre("--leg: " + v.lower_name + " is not contained in " + v.upper_name);
    return v;
}

Json report_envelope(const std::string& command, const InputDocument& doc, Json params, Json results) {
    Json r;
    r["tool"] = "pinsep";
    r["version"] = kToolVersion;
    r["command"] = command;
    r["input_digest"] = doc.digest;
    r["parameters"] = std::move(params);
    r["results"] = std::move(results);
    return r;
}

namespace {

Json pi_to_json(const PIResult& pi) {
    Json j;
    j["applicable"] = pi.applicable;
    if (!pi.applicable) {
        j["verdict"] = "not finite exponent";
        j["chain_dims"] = pi.chain_dims;
        return j;
    }
    j["verdict"] = pi.verdict;
    j["exponent"] = pi.exponent;
    j["chain_dims"] = pi.chain_dims;
    Json levels = Json::array();
    for (const auto& l : pi.levels) {
        Json lj;
        lj["level"] = l.index;
        lj["galois"] = l.galois;
        if (l.galois)
            lj["pbasis"] = l.pbasis;
        else
            lj["witness"] = l.note;
        levels.push_back(std::move(lj));
    }
    j["levels"] = std::move(levels);
    return j;
}

Json fext_to_json(const FExtResult& f) {
    Json j;
    j["applicable"] = f.applicable;
    if (!f.applicable) return j;
    j["verdict"] = f.verdict;
    j["chain_dims"] = f.chain_dims;
    if (!f.verdict) j["first_failing_level"] = f.first_failing_level;
    return j;
}

Json galois_to_json(const GaloisResult& g) {
    Json j;
    j["applicable"] = g.applicable;
    j["exponent"] = g.exponent;
    if (!g.applicable) return j;
    j["verdict"] = g.verdict;
    if (g.verdict) {
        j["pbasis"] = g.pbasis;
        j["rank"] = g.rank;
    } else {
        j["witness"] = g.note;
    }
    return j;
}

Json characterizations_to_json(const CharacterizationReport& t) {
    Json j;
    j["exponent"] = t.exponent;
    j["order_bound"] = t.bound;
    auto put = [&](const char* key, const std::optional<bool>& v) {
        if (v)
            j[key] = *v;
        else
            j[key] = "skipped";
    };
    put("chain_galois", t.cond_chain_galois);
    put("principal_parts_all", t.cond_pk_all);
    put("principal_parts_frobenius", t.cond_pk_frobenius);
    put("diff_summand_all", t.cond_diff_all);
    put("diff_summand_frobenius", t.cond_diff_frobenius);
    j["agree"] = t.agree;
    if (!t.note.empty()) j["note"] = t.note;
    return j;
}

struct PairHandle {
    std::shared_ptr<FiniteAlgebra> keep;
    const FiniteAlgebra* alg = nullptr;
    Subalgebra base;
};

PairHandle pair_handle(const InputDocument& doc, const LegView& leg) {
    PairHandle H;
    Subalgebra full = full_subalgebra(*doc.algebra);
    if (leg.upper.same(full)) {
        H.alg = doc.algebra.get();
        H.base = leg.lower;
        return H;
    }
    ExtractedAlgebra E = extract_algebra(leg.upper);
    H.keep = E.alg;
    H.alg = E.alg.get();
    H.base = restrict_subalgebra(E, leg.lower);
    return H;
}

} // namespace

Json cmd_classify(const InputDocument& doc, const std::string& leg_str, bool force, long max_dim) {
    LegView leg = resolve_leg(doc, leg_str);
    PairHandle H = pair_handle(doc, leg);
    if (H.alg->dim() > max_dim && !force)
        fail_resource("dimension " + std::to_string(H.alg->dim()) + " exceeds --max-dim " + std::to_string(max_dim));
    Json res;
    res["leg"] = leg.lower_name + ":" + leg.upper_name;
    res["dim"] = H.alg->dim();
    res["base_dim"] = H.base.dim();
    FrobeniusChain chain = frobenius_chain(*H.alg, H.base);
    res["finite_exponent"] = chain.finite;
    res["chain_dims"] = chain.dims;
    if (chain.finite) res["exponent"] = chain.exponent;
    PIResult pi = is_purely_inseparable(*H.alg, H.base);
    res["purely_inseparable"] = pi_to_json(pi);
    FExtResult fe = is_f_extension(*H.alg, H.base);
    res["f_extension"] = fext_to_json(fe);
    if (chain.finite && chain.exponent <= 1) res["galois"] = galois_to_json(is_galois(*H.alg, H.base));
    if (chain.finite && H.alg->is_local()) {
        GNGSData G = gngs(*H.alg, H.base);
        Json gj;
        gj["elements"] = G.names;
        gj["n_seq"] = G.n_seq;
        gj["e_seq"] = G.e_seq;
        gj["sum_identity"] = Json::array({G.sum_n, G.sum_e});
        res["gngs"] = std::move(gj);
        NGSResult N = ngs_presentation(*H.alg, H.base, G);
        Json nj;
        nj["presentable"] = N.presentable;
        nj["isomorphism"] = N.isomorphism;
        if (!N.witness.empty()) nj["witness"] = N.witness;
        res["ngs"] = std::move(nj);
    }
    if (chain.finite && (H.alg->dim() <= 30 || force)) res["characterizations"] = characterizations_to_json(characterization_report(*H.alg, H.base));
    if (H.base.dim() > 1 && H.alg->is_local()) {
        FiberResult f = fiber_check(*H.alg, H.base);
        if (f.applicable) {
            Json fj;
            fj["fiber_dim"] = f.fiber_dim;
            fj["fiber_purely_inseparable"] = f.fiber_pi;
            fj["biconditional_holds"] = f.biconditional_holds;
            res["fiber"] = std::move(fj);
        }
    }
    Json params;
    params["leg"] = leg_str;
    return report_envelope("classify", doc, std::move(params), std::move(res));
}

Json cmd_tower(const InputDocument& doc) {
    const Subalgebra* A = doc.find_subring("A");
    const Subalgebra* B = doc.find_subring("B");
    if (!A || !B) fail_pre("tower: the document must declare subrings A and B");
    TowerSpec T;
    T.C = doc.algebra.get();
    T.A = *A;
    T.B = *B;
    TowerReport R = tower_report(T);
    Json res;
    auto leg = [&](const LegReport& L) {
        Json j;
        j["exponent"] = L.exponent;
        j["purely_inseparable"] = pi_to_json(L.pi);
        j["f_extension"] = fext_to_json(L.fext);
        if (L.galois) j["galois"] = galois_to_json(*L.galois);
        return j;
    };
    res["A:B"] = leg(R.ab);
    res["B:C"] = leg(R.bc);
    res["A:C"] = leg(R.ac);
    res["tower_purely_inseparable"] = R.tower_pi;
    Json aux = Json::array();
    for (auto [e, ok] : R.aux_fext) {
        Json a;
        a["e"] = e;
        a["f_extension"] = ok;
        aux.push_back(std::move(a));
    }
    res["auxiliary_BCpe"] = std::move(aux);
    res["auxiliary_true_count"] = R.aux_fext_true;
    Json th = Json::array();
    for (const auto& t : R.theorems) {
        Json j;
        j["name"] = t.name;
        j["hypotheses_hold"] = t.hypotheses_hold;
        j["conclusion_checked"] = t.conclusion_checked;
        if (t.conclusion_checked) j["conclusion_holds"] = t.conclusion_holds;
        j["detail"] = t.detail;
        th.push_back(std::move(j));
    }
    res["theorems"] = std::move(th);
    return report_envelope("tower", doc, Json::object(), std::move(res));
}

Json cmd_jb(const InputDocument& doc, long max_dim) {
    const FiniteAlgebra& C = *doc.algebra;
    if (static_cast<long>(C.dim()) * C.dim() > max_dim * max_dim && C.dim() > 100)
        fail_resource("jb: dimension too large");
    Subalgebra A = prime_subalgebra(C);
    if (const Subalgebra* a = doc.find_subring("A")) A = *a;

    std::vector<std::pair<std::string, Subalgebra>> candB;
    for (const auto& [name, s] : doc.subrings)
        if (name != "A") candB.push_back({name, s});
    FrobeniusChain chain = frobenius_chain(C, A);
    for (size_t e = 1; e + 1 < chain.levels.size(); ++e)
        candB.push_back({"C^[" + std::to_string(e) + "]", chain.levels[e]});
    if (C.dim() <= 8 && subspace_lattice_size(C.dim(), C.p(), 2000000) <= 2000000) {
        auto all = enumerate_subalgebras(C);
        for (size_t i = 0; i < all.size(); ++i) {
            if (!all[i].contains_subalgebra(A)) continue;
            candB.push_back({"enum_" + std::to_string(i), all[i]});
        }
    }

    std::vector<std::pair<std::string, std::vector<Vec>>> candH;
    EndAlgebra E = end_algebra(C, A);
    for (const auto& [name, flat] : doc.endomorphisms) {
        EndSubalgebra H = close_subalgebra(E, {flat});
        candH.push_back({name, H.span.rows()});
    }
    RoundtripReport R = verify_correspondence(C, A, candB, candH);

    Json res;
    res["hypothesis"] = R.hypothesis;
    res["end_dim"] = E.dim();
    Json left = Json::array();
    for (const auto& l : R.left) {
        Json j;
        j["candidate"] = l.name;
        j["eligible"] = l.eligible;
        if (l.eligible)
            j["roundtrip"] = l.roundtrip;
        else
            j["reason"] = l.note;
        left.push_back(std::move(j));
    }
    res["intermediate_rings"] = std::move(left);
    Json right = Json::array();
    for (const auto& r : R.right) {
        Json j;
        j["candidate"] = r.name;
        j["summand"] = r.summand;
        j["roundtrip"] = r.roundtrip;
        if (!r.note.empty()) j["note"] = r.note;
        right.push_back(std::move(j));
    }
    res["subalgebras_of_End"] = std::move(right);
    // collision listing among the declared H's
    Json coll = Json::array();
    for (size_t i = 0; i < candH.size(); ++i)
        for (size_t j = i + 1; j < candH.size(); ++j) {
            EndSubalgebra Hi = make_end_subalgebra(E, candH[i].second);
            EndSubalgebra Hj = make_end_subalgebra(E, candH[j].second);
            Subalgebra Bi = constants_of(E, Hi), Bj = constants_of(E, Hj);
            if (Bi.span.same_span(Bj.span) && !Hi.span.same_span(Hj.span)) {
                Json c;
                c["first"] = candH[i].first;
                c["second"] = candH[j].first;
                c["dims"] = Json::array({Hi.span.rank(), Hj.span.rank()});
                c["constants_dim"] = Bi.dim();
                coll.push_back(std::move(c));
            }
        }
    res["collisions"] = std::move(coll);
    res["all_roundtrips_hold"] = R.all_hold;
    // special bases for summand candidates (derived from the B's and the seeds)
    Json sb = Json::array();
    if (C.is_local() && chain.finite) {
        std::vector<std::pair<std::string, std::vector<Vec>>> hlist = candH;
        for (const auto& [name, B] : candB) {
            if (name.rfind("enum_", 0) == 0) continue;
            CModule m = module_over(C, B);
            if (!is_free(m)) continue;
            hlist.push_back({"End_" + name + "(C)", end_over(E, B).span.rows()});
        }
        for (const auto& [name, rows] : hlist) {
            EndSubalgebra H = make_end_subalgebra(E, rows);
            if (!H.summand || !H.contains_unit || !H.composition_closed) continue;
            SpecialBasis S = special_basis(E, H);
            Json j;
            j["candidate"] = name;
            j["rank"] = S.l;
            j["t_count"] = static_cast<int>(S.t.size());
            sb.push_back(std::move(j));
        }
    }
    res["special_bases"] = std::move(sb);
    return report_envelope("jb", doc, Json::object(), std::move(res));
}

Json cmd_diff(const InputDocument& doc, const std::string& leg_str, int order, const std::string& op, bool force) {
    LegView leg = resolve_leg(doc, leg_str);
    PairHandle H = pair_handle(doc, leg);
    const FiniteAlgebra& C = *H.alg;
    if (static_cast<long>(C.dim()) * C.dim() > 10000 && !force)
        fail_resource("diff: Hom dimension exceeds the threshold (use --force)");
    TargetModule M = target_self(C);
    TensorSquare T = tensor_square(C, H.base);
    Json res;
    res["leg"] = leg.lower_name + ":" + leg.upper_name;
    res["dim"] = C.dim();
    Json dims_dual = Json::array(), dims_bracket = Json::array();
    bool equal = true;
    for (int k = 0; k <= order; ++k) {
        OperatorSpace dual = diff_operators_dual(T, H.base, M, k);
        OperatorSpace bracket = diff_operators(C, H.base, M, k, DiffRoute::Bracket);
        dims_dual.push_back(dual.dim());
        dims_bracket.push_back(bracket.dim());
        if (!dual.flat.same_span(bracket.flat)) equal = false;
    }
    res["diff_dims_dual"] = std::move(dims_dual);
    res["diff_dims_bracket"] = std::move(dims_bracket);
    res["routes_agree"] = equal;
    if (op == "basis") {
        PBasisSearch S = find_pbasis(C, H.base);
        Json j;
        j["found"] = S.found;
        if (S.found) {
            j["pbasis"] = S.names;
            PBasisCalculus P = partials_from_pbasis(C, H.base, S.elements);
            j["partials"] = static_cast<int>(P.partial.size());
        }
        res["pbasis"] = std::move(j);
    } else if (op == "delta") {
        if (C.from_presentation_input() && C.presentation().is_split()) {
            Json arr = Json::array();
            const auto& pr = C.presentation();
            std::vector<uint32_t> alpha(pr.gen_names.size(), 0);
            for (size_t i = 0; i < pr.gen_names.size(); ++i) {
                alpha.assign(pr.gen_names.size(), 0);
                alpha[i] = 1;
                FpMat D = delta_alpha(C, alpha);
                auto ord = order_of(C, M, D, order + 2);
                Json j;
                j["alpha"] = "e_" + std::to_string(i + 1);
                j["order"] = ord ? Json(*ord) : Json("unbounded in range");
                arr.push_back(std::move(j));
            }
            res["delta_alpha"] = std::move(arr);
        } else {
            res["delta_alpha"] = "requires a split modular presentation";
        }
    } else if (op == "ext" || op == "res") {
        FrobeniusChain chain = frobenius_chain(C, H.base);
        if (chain.finite && chain.exponent >= 1) {
            const Subalgebra& C1 = chain.levels[1];
            PBasisSearch S = find_pbasis(C, C1);
            Json j;
            j["pbasis_over_C1"] = S.found;
            if (S.found) {
                LevelOperators L = diff_operators_on_level(C, H.base, C1, order, DiffRoute::Dual);
                int checked = 0, ok = 0;
                for (const FpMat& del : L.ops.basis) {
                    FpMat D = extend_along_pbasis(C, M, C1, S.elements, del);
                    RestrictedOp back = restrict_to(C, M, D, C1, order * C.p());
                    ++checked;
                    if (back.mat == del) ++ok;
                }
                j["extended"] = checked;
                j["res_ext_identity"] = (checked == ok);
            }
            res["ext_res"] = std::move(j);
        } else {
            res["ext_res"] = "requires finite positive exponent";
        }
    }
    Json params;
    params["leg"] = leg_str;
    params["order"] = order;
    if (!op.empty()) params["op"] = op;
    return report_envelope("diff", doc, std::move(params), std::move(res));
}

namespace {

void render(const Json& j, const std::string& indent, std::string& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (it.value().is_object() || it.value().is_array()) {
                out += indent + it.key() + ":\n";
                render(it.value(), indent + "  ", out);
            } else {
                out += indent + it.key() + ": " + it.value().dump() + "\n";
            }
        }
    } else if (j.is_array()) {
        bool scalars = std::all_of(j.begin(), j.end(), [](const Json& v) { return !v.is_object() && !v.is_array(); });
        if (scalars) {
            out += indent + j.dump() + "\n";
        } else {
            for (const Json& v : j) {
                out += indent + "-\n";
                render(v, indent + "  ", out);
            }
        }
    } else {
        out += indent + j.dump() + "\n";
    }
}

} // namespace

std::string render_text(const Json& report) {
    std::string out;
    out += "pinsep " + report["version"].get<std::string>() + " :: " + report["command"].get<std::string>() + "\n";
    out += "input digest " + report["input_digest"].get<std::string>() + "\n";
    render(report["results"], "", out);
    return out;
}

} // namespace pinsep
