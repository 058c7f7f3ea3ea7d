#include "pinsep/input.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace pinsep {

std::string fnv1a_hex(const std::string& bytes) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

struct TermParser {
    // parses "c*g1^a1*g2^a2" style terms over named symbols
    const std::map<std::string, int>& names;
    int line;

    std::pair<uint32_t, std::map<int, uint32_t>> parse_term(const std::string& term) const {
        uint32_t coeff = 1;
        bool saw_coeff = false;
        std::map<int, uint32_t> exps;
        for (const std::string& rawf : split(term, '*')) {
            std::string f = trim(rawf);
            if (f.empty()) fail_parse("line " + std::to_string(line) + ": empty factor");
            if (std::isdigit(static_cast<unsigned char>(f[0]))) {
                if (saw_coeff) fail_parse("line " + std::to_string(line) + ": two numeric coefficients in a term");
                size_t pos = 0;
                coeff = static_cast<uint32_t>(std::stoul(f, &pos));
                if (pos != f.size()) fail_parse("line " + std::to_string(line) + ": malformed coefficient '" + f + "'");
                saw_coeff = true;
                continue;
            }
            std::string base = f;
            uint32_t e = 1;
            size_t caret = f.find('^');
            if (caret != std::string::npos) {
                base = trim(f.substr(0, caret));
                std::string es = trim(f.substr(caret + 1));
                size_t pos = 0;
                e = static_cast<uint32_t>(std::stoul(es, &pos));
                if (pos != es.size() || es.empty())
                    fail_parse("line " + std::to_string(line) + ": malformed exponent '" + es + "'");
            }
            auto it = names.find(base);
            if (it == names.end()) fail_parse("line " + std::to_string(line) + ": unknown name '" + base + "'");
            exps[it->second] += e;
        }
        return {coeff, exps};
    }
};

} // namespace

Vec eval_expression(const FiniteAlgebra& A, const std::string& expr) {
    std::map<std::string, int> names;
    const bool use_gens = A.from_presentation_input();
    const auto& list = use_gens ? A.gen_names() : A.basis_names();
    for (size_t i = 0; i < list.size(); ++i) names[list[i]] = static_cast<int>(i);
    Vec out = A.zero();
    for (const std::string& term : split(expr, '+')) {
        if (trim(term).empty()) fail_parse("empty term in expression '" + expr + "'");
        TermParser tp{names, 0};
        auto [coeff, exps] = tp.parse_term(trim(term));
        Vec v = A.one();
        for (const auto& [gi, e] : exps) {
            Vec g = use_gens ? A.generators()[gi] : A.basis_vec(gi);
            for (uint32_t t = 0; t < e; ++t) v = A.mul(v, g);
        }
        vec_axpy(out, static_cast<uint8_t>(coeff % A.p()), v, A.p());
    }
    return out;
}

const Subalgebra* InputDocument::find_subring(const std::string& name) const {
    for (const auto& [n, s] : subrings)
        if (n == name) return &s;
    return nullptr;
}

InputDocument parse_document(const std::string& text, size_t dim_cap) {
    InputDocument doc;
    doc.digest = fnv1a_hex(text);

    struct Section {
        std::string kind, name;
        std::vector<std::pair<int, std::string>> lines;
    };
    std::vector<Section> sections;
    {
        std::istringstream in(text);
        std::string raw;
        int lineno = 0;
        while (std::getline(in, raw)) {
            ++lineno;
            std::string line = raw;
            size_t hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') fail_parse("line " + std::to_string(lineno) + ": unterminated section header");
                std::string head = trim(line.substr(1, line.size() - 2));
                auto parts = split(head, ' ');
                Section s;
                s.kind = parts[0];
                if (parts.size() > 1) s.name = parts[1];
                sections.push_back(std::move(s));
            } else {
                if (sections.empty()) fail_parse("line " + std::to_string(lineno) + ": content before any section");
                sections.back().lines.push_back({lineno, line});
            }
        }
    }

    // [algebra]
    auto alg_it = std::find_if(sections.begin(), sections.end(), [](const Section& s) { return s.kind == "algebra"; });
    if (alg_it == sections.end()) fail_parse("missing [algebra] section");
    {
        uint32_t p = 0;
        std::vector<std::string> gen_names;
        std::vector<std::string> basis_names;
        std::string one_expr;
        std::vector<std::tuple<int, std::string, std::string>> relations; // line, lhs, rhs
        std::vector<std::tuple<int, std::string, std::string, std::string>> products; // line, a, b, rhs
        std::string gens_line;
        for (const auto& [ln, line] : alg_it->lines) {
            size_t eq = line.find('=');
            if (eq == std::string::npos) fail_parse("line " + std::to_string(ln) + ": expected key = value");
            std::string key = trim(line.substr(0, eq));
            std::string val = trim(line.substr(eq + 1));
            if (key == "p") {
                p = static_cast<uint32_t>(std::stoul(val));
            } else if (key == "generators") {
                if (!basis_names.empty())
                    gens_line = val;
                else
                    gen_names = split(val, ',');
            } else if (key == "basis") {
                basis_names = split(val, ',');
            } else if (key == "one") {
                one_expr = val;
            } else if (key.find('*') != std::string::npos) {
                auto parts = split(key, '*');
                if (parts.size() != 2) fail_parse("line " + std::to_string(ln) + ": malformed product key");
                products.push_back({ln, parts[0], parts[1], val});
            } else {
                relations.push_back({ln, key, val});
            }
        }
        if (!is_prime(p)) fail_parse("[algebra]: p must be a prime, got " + std::to_string(p));

        if (!basis_names.empty()) {
            // structure constants
            const int d = static_cast<int>(basis_names.size());
            std::map<std::string, int> bidx;
            for (int i = 0; i < d; ++i) bidx[basis_names[i]] = i;
            std::vector<std::vector<Vec>> table(d, std::vector<Vec>(d));
            std::vector<std::vector<bool>> have(d, std::vector<bool>(d, false));
            auto parse_rhs = [&](int ln, const std::string& rhs) {
                Vec v(d, 0);
                if (trim(rhs) == "0") return v;
                for (const std::string& term : split(rhs, '+')) {
                    TermParser tp{bidx, ln};
                    auto [coeff, exps] = tp.parse_term(trim(term));
                    if (exps.size() != 1)
                        fail_parse("line " + std::to_string(ln) + ": structure constants must be linear in the basis");
                    auto [bi, e] = *exps.begin();
                    if (e != 1) fail_parse("line " + std::to_string(ln) + ": structure constants must be linear");
                    v[bi] = static_cast<uint8_t>((v[bi] + coeff) % p);
                }
                return v;
            };
            for (const auto& [ln, a, b, rhs] : products) {
                auto ia = bidx.find(trim(a)), ib = bidx.find(trim(b));
                if (ia == bidx.end() || ib == bidx.end())
                    fail_parse("line " + std::to_string(ln) + ": unknown basis name in product");
                Vec v = parse_rhs(ln, rhs);
                table[ia->second][ib->second] = v;
                table[ib->second][ia->second] = v;
                have[ia->second][ib->second] = have[ib->second][ia->second] = true;
            }
            for (int i = 0; i < d; ++i)
                for (int j = i; j < d; ++j)
                    if (!have[i][j])
                        fail_parse("[algebra]: missing product " + basis_names[i] + "*" + basis_names[j]);
            if (one_expr.empty()) fail_parse("[algebra]: structure-constant input requires 'one ='");
            Vec one(d, 0);
            for (const std::string& term : split(one_expr, '+')) {
                TermParser tp{bidx, 0};
                auto [coeff, exps] = tp.parse_term(trim(term));
                if (exps.size() != 1) fail_parse("[algebra]: 'one' must be a combination of basis names");
                one[exps.begin()->first] = static_cast<uint8_t>(coeff % p);
            }
            doc.algebra = std::make_shared<FiniteAlgebra>(FiniteAlgebra::from_structure_constants(
                static_cast<uint16_t>(p), basis_names, std::move(table), std::move(one), {}, {}));
        } else {
            if (gen_names.empty()) fail_parse("[algebra]: missing 'generators ='");
            Presentation pr;
            pr.p = static_cast<uint16_t>(p);
            pr.gen_names = gen_names;
            pr.exponents.assign(gen_names.size(), 0);
            pr.relations.assign(gen_names.size(), {});
            std::map<std::string, int> gidx;
            for (size_t i = 0; i < gen_names.size(); ++i) gidx[gen_names[i]] = static_cast<int>(i);
            std::vector<bool> have(gen_names.size(), false);
            for (const auto& [ln, lhs, rhs] : relations) {
                size_t caret = lhs.find('^');
                if (caret == std::string::npos)
                    fail_parse("line " + std::to_string(ln) + ": relation left side must be g^N");
                std::string g = trim(lhs.substr(0, caret));
                auto gi = gidx.find(g);
                if (gi == gidx.end()) fail_parse("line " + std::to_string(ln) + ": unknown generator '" + g + "'");
                uint64_t N = std::stoull(trim(lhs.substr(caret + 1)));
                uint32_t e = 0;
                uint64_t q = N;
                while (q > 1 && q % p == 0) {
                    q /= p;
                    ++e;
                }
                if (q != 1 || e == 0)
                    fail_parse("line " + std::to_string(ln) + ": relation exponent " + std::to_string(N) +
                               " is not a positive power of p");
                if (have[gi->second]) fail_parse("line " + std::to_string(ln) + ": duplicate relation for " + g);
                have[gi->second] = true;
                pr.exponents[gi->second] = e;
                if (trim(rhs) != "0") {
                    for (const std::string& term : split(rhs, '+')) {
                        TermParser tp{gidx, ln};
                        auto [coeff, exps] = tp.parse_term(trim(term));
                        if (coeff % p == 0) continue;
                        Monomial mo;
                        mo.coeff = static_cast<uint8_t>(coeff % p);
                        mo.exps.assign(gen_names.size(), 0);
                        for (const auto& [j, ee] : exps) mo.exps[j] = ee;
                        pr.relations[gi->second].push_back(std::move(mo));
                    }
                }
            }
            for (size_t i = 0; i < gen_names.size(); ++i)
                if (!have[i]) fail_parse("[algebra]: missing relation for generator " + gen_names[i]);
            doc.algebra = std::make_shared<FiniteAlgebra>(FiniteAlgebra::from_presentation(pr, dim_cap));
        }
    }

    // [subring NAME] and [endomorphism NAME]
    for (const Section& s : sections) {
        if (s.kind == "subring") {
            if (s.name.empty()) fail_parse("[subring] requires a name");
            std::vector<Vec> seeds;
            std::vector<std::string> names;
            for (const auto& [ln, line] : s.lines) {
                size_t eq = line.find('=');
                if (eq == std::string::npos) fail_parse("line " + std::to_string(ln) + ": expected generators = ...");
                std::string key = trim(line.substr(0, eq));
                std::string val = trim(line.substr(eq + 1));
                if (key != "generators") fail_parse("line " + std::to_string(ln) + ": unknown subring key " + key);
                if (val.empty()) continue;
                for (const std::string& expr : split(val, ',')) {
                    seeds.push_back(eval_expression(*doc.algebra, expr));
                    names.push_back(expr);
                }
            }
            doc.subrings.push_back({s.name, subalgebra_generated(*doc.algebra, seeds, names)});
        } else if (s.kind == "endomorphism") {
            if (s.name.empty()) fail_parse("[endomorphism] requires a name");
            const int d = doc.algebra->dim();
            Vec flat(static_cast<size_t>(d) * d, 0);
            bool got = false;
            for (const auto& [ln, line] : s.lines) {
                size_t eq = line.find('=');
                if (eq == std::string::npos) fail_parse("line " + std::to_string(ln) + ": expected matrix = ...");
                std::string key = trim(line.substr(0, eq));
                std::string val = trim(line.substr(eq + 1));
                if (key != "matrix") fail_parse("line " + std::to_string(ln) + ": unknown endomorphism key " + key);
                auto rows = split(val, ';');
                if (static_cast<int>(rows.size()) != d)
                    fail_parse("line " + std::to_string(ln) + ": expected " + std::to_string(d) + " matrix rows");
                for (int i = 0; i < d; ++i) {
                    auto entries = split(rows[i], ',');
                    if (static_cast<int>(entries.size()) != d)
                        fail_parse("line " + std::to_string(ln) + ": expected " + std::to_string(d) + " entries per row");
                    for (int j = 0; j < d; ++j)
                        flat[static_cast<size_t>(i) * d + j] =
                            static_cast<uint8_t>(std::stoul(entries[j]) % doc.algebra->p());
                }
                got = true;
            }
            if (!got) fail_parse("[endomorphism " + s.name + "]: missing matrix");
            doc.endomorphisms.push_back({s.name, std::move(flat)});
        } else if (s.kind == "task") {
            for (const auto& [ln, line] : s.lines) {
                size_t eq = line.find('=');
                if (eq == std::string::npos) fail_parse("line " + std::to_string(ln) + ": expected key = value");
                doc.task[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
            }
        } else if (s.kind != "algebra") {
            fail_parse("unknown section [" + s.kind + "]");
        }
    }
    return doc;
}

InputDocument load_document(const std::string& path, size_t dim_cap) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_parse("cannot open input file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_document(ss.str(), dim_cap);
}

} // namespace pinsep
