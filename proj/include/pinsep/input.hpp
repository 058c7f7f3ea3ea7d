#ifndef PINSEP_INPUT_HPP
#define PINSEP_INPUT_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pinsep/algebra.hpp"

namespace pinsep {

// Parsed .pinsep document: [algebra] section (presentation relations or
// structure constants), any number of [subring NAME] sections, optional
// [endomorphism NAME] sections, and a [task] key-value section.
struct InputDocument {
    std::shared_ptr<FiniteAlgebra> algebra;
    std::vector<std::pair<std::string, Subalgebra>> subrings;
    std::vector<std::pair<std::string, Vec>> endomorphisms; // flattened d x d matrices
    std::map<std::string, std::string> task;
    std::string digest; // fnv1a-64 of the raw document bytes

    const Subalgebra* find_subring(const std::string& name) const;
};

InputDocument parse_document(const std::string& text, size_t dim_cap = 100000);
InputDocument load_document(const std::string& path, size_t dim_cap = 100000);

// polynomial expression over named generators, evaluated in the algebra
Vec eval_expression(const FiniteAlgebra& A, const std::string& expr);

std::string fnv1a_hex(const std::string& bytes);

} // namespace pinsep

#endif
