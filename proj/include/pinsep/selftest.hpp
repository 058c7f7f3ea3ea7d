#ifndef PINSEP_SELFTEST_HPP
#define PINSEP_SELFTEST_HPP

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace pinsep {

struct SelftestResult {
    int passed = 0;
    int failed = 0;
    std::vector<std::string> failures;
};

// Runs the invariant suite over the given corpus files. `filter` is a substring
// match on property names ("" = all). Prints one line per (file, property).
SelftestResult run_selftest(const std::vector<std::string>& corpus_files, const std::string& filter,
                            std::ostream& out);

} // namespace pinsep

#endif
