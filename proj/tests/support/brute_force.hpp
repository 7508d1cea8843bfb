#pragma once

// Independent brute-force evaluation of the indexed moment tables, used to
// cross-check moment_table_oracle / xpm_moment_oracle.  Index-equality
// patterns are parsed into groups of symbol slots; each group corresponds to
// one time index, so each group receives an independent uniform draw from
// the alphabet and the expectation is the exact average over all |A|^G
// assignments.  Nothing here reuses the library's factored expressions.

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "nli4d/constellation.hpp"

namespace nli4d::testing {

inline std::vector<std::vector<std::string>> pattern_groups(std::string pattern) {
    // Separate groups first ("!=" -> '|'), then split each group on '='.
    for (std::size_t pos = 0; (pos = pattern.find("!=", pos)) != std::string::npos;)
        pattern.replace(pos, 2, "|");
    std::vector<std::vector<std::string>> groups;
    std::size_t start = 0;
    while (start <= pattern.size()) {
        std::size_t bar = pattern.find('|', start);
        std::string chunk = pattern.substr(
            start, bar == std::string::npos ? std::string::npos : bar - start);
        std::vector<std::string> slots;
        std::size_t s = 0;
        while (s <= chunk.size()) {
            std::size_t eq = chunk.find('=', s);
            std::string slot = chunk.substr(
                s, eq == std::string::npos ? std::string::npos : eq - s);
            if (!slot.empty()) slots.push_back(slot);
            if (eq == std::string::npos) break;
            s = eq + 1;
        }
        if (!slots.empty()) groups.push_back(std::move(slots));
        if (bar == std::string::npos) break;
        start = bar + 1;
    }
    return groups;
}

// factor(slot, point) returns the (possibly conjugated) amplitude the slot
// contributes.  Averages the product over all independent group assignments.
template <typename Factor>
cplx brute_force_average(const Constellation4D& c,
                         const std::vector<std::string>& slot_names,
                         const std::string& pattern, Factor&& factor) {
    const auto groups = pattern_groups(pattern);
    std::vector<int> group_of(slot_names.size(), -1);
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (const auto& slot : groups[g]) {
            bool found = false;
            for (std::size_t i = 0; i < slot_names.size(); ++i)
                if (slot_names[i] == slot) {
                    if (group_of[i] != -1)
                        throw std::logic_error("slot repeated in pattern: " + slot);
                    group_of[i] = static_cast<int>(g);
                    found = true;
                }
            if (!found) throw std::logic_error("unknown slot in pattern: " + slot);
        }
    for (std::size_t i = 0; i < slot_names.size(); ++i)
        if (group_of[i] == -1)
            throw std::logic_error("pattern misses slot: " + slot_names[i]);

    const std::size_t m = c.points.size();
    const std::size_t g_count = groups.size();
    std::vector<std::size_t> idx(g_count, 0);
    cplx sum = 0;
    double count = 0;
    for (;;) {
        cplx prod = 1.0;
        for (std::size_t i = 0; i < slot_names.size(); ++i)
            prod *= factor(slot_names[i], c.points[idx[group_of[i]]]);
        sum += prod;
        count += 1.0;
        std::size_t d = 0;
        while (d < g_count && ++idx[d] == m) idx[d++] = 0;
        if (d == g_count) break;
    }
    return sum / count;
}

// E{ a_{h,y} a*_{k,y} a_{l,x} a*_{h',y} a_{k',y} a*_{l',x} }
inline cplx brute_force_sixth(const Constellation4D& c, const std::string& pattern) {
    static const std::vector<std::string> slots = {"h", "k", "l", "h'", "k'", "l'"};
    return brute_force_average(c, slots, pattern,
                               [](const std::string& slot, const Point4D& p) -> cplx {
                                   if (slot == "h") return p.ay;
                                   if (slot == "k") return std::conj(p.ay);
                                   if (slot == "l") return p.ax;
                                   if (slot == "h'") return std::conj(p.ay);
                                   if (slot == "k'") return p.ay;
                                   return std::conj(p.ax);  // l'
                               });
}

// E{ b_{h,x} b*_{k,x} b*_{h',x} b_{k',x} }
inline cplx brute_force_fourth(const Constellation4D& c, const std::string& pattern) {
    static const std::vector<std::string> slots = {"h", "k", "h'", "k'"};
    return brute_force_average(c, slots, pattern,
                               [](const std::string& slot, const Point4D& p) -> cplx {
                                   if (slot == "h" || slot == "k'") return p.ax;
                                   return std::conj(p.ax);  // k, h'
                               });
}

inline const std::vector<std::string>& sixth_order_patterns() {
    static const std::vector<std::string> patterns = {
        "h=k=l=h'=k'=l'",
        "h=h'!=l=k=k'=l'",
        "h=k!=l=h'=k'=l'",
        "h=l'!=l=k=h'=k'",
        "k=l!=h=h'=k'=l'",
        "k=k'!=h=l=h'=l'",
        "l=h'!=h=k=k'=l'",
        "l=l'!=h=k=h'=k'",
        "h'=k'!=h=k=l=l'",
        "k'=l'!=h=k=l=h'",
        "h=h'!=k=k'!=l=l'",
        "h=k!=l=h'!=k'=l'",
        "h=k!=l=l'!=k'=h'",
        "h=h'!=k=l!=k'=l'",
        "h=l'!=k=l!=h'=k'",
        "h=l'!=k=k'!=l=h'",
    };
    return patterns;
}

inline const std::vector<std::string>& fourth_order_patterns() {
    static const std::vector<std::string> patterns = {
        "h=k=h'=k'",
        "h=k!=h'=k'",
        "h=h'!=k=k'",
    };
    return patterns;
}

}  // namespace nli4d::testing
