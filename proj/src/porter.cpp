// Copyright 2026 The cellrec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <string>
#include <string_view>

#include "cellrec/text.hpp"

namespace cellrec {

namespace {

// Working state over one word. `k` is the index of the last character of the
// current stem, `j` the end of the stem preceding a matched suffix.
class PorterStemmer {
public:
    explicit PorterStemmer(std::string word) : b_(std::move(word)), k_(static_cast<int>(b_.size()) - 1) {}

    std::string run() {
        if (k_ <= 1) return b_;
        step1ab();
        if (k_ > 0) {
            step1c();
            step2();
            step3();
            step4();
            step5();
        }
        return b_.substr(0, static_cast<std::size_t>(k_ + 1));
    }

private:
    bool cons(int i) const {
        switch (b_[i]) {
            case 'a':
            case 'e':
            case 'i':
            case 'o':
            case 'u':
                return false;
            case 'y':
                return i == 0 ? true : !cons(i - 1);
            default:
                return true;
        }
    }

    // Number of VC sequences in b[0..j].
    int measure() const {
        int n = 0;
        int i = 0;
        for (;;) {
            if (i > j_) return n;
            if (!cons(i)) break;
            ++i;
        }
        ++i;
        for (;;) {
            for (;;) {
                if (i > j_) return n;
                if (cons(i)) break;
                ++i;
            }
            ++i;
            ++n;
            for (;;) {
                if (i > j_) return n;
                if (!cons(i)) break;
                ++i;
            }
            ++i;
        }
    }

    bool vowel_in_stem() const {
        for (int i = 0; i <= j_; ++i) {
            if (!cons(i)) return true;
        }
        return false;
    }

    bool double_cons(int i) const { return i >= 1 && b_[i] == b_[i - 1] && cons(i); }

    // consonant-vowel-consonant ending at i, last consonant not w, x or y
    bool cvc(int i) const {
        if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
        const char c = b_[i];
        return c != 'w' && c != 'x' && c != 'y';
    }

    bool ends(std::string_view s) {
        const int len = static_cast<int>(s.size());
        if (len > k_ + 1) return false;
        if (std::string_view(b_).substr(static_cast<std::size_t>(k_ - len + 1), s.size()) != s) return false;
        j_ = k_ - len;
        return true;
    }

    void set_to(std::string_view s) {
        b_.replace(static_cast<std::size_t>(j_ + 1), static_cast<std::size_t>(k_ - j_), s);
        k_ = j_ + static_cast<int>(s.size());
    }

    void replace_if_measured(std::string_view s) {
        if (measure() > 0) set_to(s);
    }

    // Plurals and -ed / -ing.
    void step1ab() {
        if (b_[k_] == 's') {
            if (ends("sses")) {
                k_ -= 2;
            } else if (ends("ies")) {
                set_to("i");
            } else if (b_[k_ - 1] != 's') {
                --k_;
            }
        }
        if (ends("eed")) {
            if (measure() > 0) --k_;
        } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
            k_ = j_;
            if (ends("at")) {
                set_to("ate");
            } else if (ends("bl")) {
                set_to("ble");
            } else if (ends("iz")) {
                set_to("ize");
            } else if (double_cons(k_)) {
                --k_;
                const char c = b_[k_];
                if (c == 'l' || c == 's' || c == 'z') ++k_;
            } else if (measure() == 1 && cvc(k_)) {
                set_to("e");
            }
        }
    }

    void step1c() {
        if (ends("y") && vowel_in_stem()) b_[k_] = 'i';
    }

    struct Rule {
        std::string_view suffix;
        std::string_view replacement;
    };

    template <std::size_t N>
    void apply_first(const Rule (&rules)[N]) {
        for (const auto& rule : rules) {
            if (ends(rule.suffix)) {
                replace_if_measured(rule.replacement);
                return;
            }
        }
    }

    void step2() {
        switch (b_[k_ - 1]) {
            case 'a': {
                static constexpr Rule r[] = {{"ational", "ate"}, {"tional", "tion"}};
                apply_first(r);
                break;
            }
            case 'c': {
                static constexpr Rule r[] = {{"enci", "ence"}, {"anci", "ance"}};
                apply_first(r);
                break;
            }
            case 'e': {
                static constexpr Rule r[] = {{"izer", "ize"}};
                apply_first(r);
                break;
            }
            case 'l': {
                static constexpr Rule r[] = {
                    {"bli", "ble"}, {"alli", "al"}, {"entli", "ent"}, {"eli", "e"}, {"ousli", "ous"}};
                apply_first(r);
                break;
            }
            case 'o': {
                static constexpr Rule r[] = {{"ization", "ize"}, {"ation", "ate"}, {"ator", "ate"}};
                apply_first(r);
                break;
            }
            case 's': {
                static constexpr Rule r[] = {
                    {"alism", "al"}, {"iveness", "ive"}, {"fulness", "ful"}, {"ousness", "ous"}};
                apply_first(r);
                break;
            }
            case 't': {
                static constexpr Rule r[] = {{"aliti", "al"}, {"iviti", "ive"}, {"biliti", "ble"}};
                apply_first(r);
                break;
            }
            case 'g': {
                static constexpr Rule r[] = {{"logi", "log"}};
                apply_first(r);
                break;
            }
            default:
                break;
        }
    }

    void step3() {
        switch (b_[k_]) {
            case 'e': {
                static constexpr Rule r[] = {{"icate", "ic"}, {"ative", ""}, {"alize", "al"}};
                apply_first(r);
                break;
            }
            case 'i': {
                static constexpr Rule r[] = {{"iciti", "ic"}};
                apply_first(r);
                break;
            }
            case 'l': {
                static constexpr Rule r[] = {{"ical", "ic"}, {"ful", ""}};
                apply_first(r);
                break;
            }
            case 's': {
                static constexpr Rule r[] = {{"ness", ""}};
                apply_first(r);
                break;
            }
            default:
                break;
        }
    }

    // Drops -ant, -ence etc. when the remaining stem has measure > 1.
    void step4() {
        auto any = [this](std::initializer_list<std::string_view> suffixes) {
            return std::any_of(suffixes.begin(), suffixes.end(), [this](std::string_view s) { return ends(s); });
        };
        bool matched = false;
        switch (b_[k_ - 1]) {
            case 'a': matched = any({"al"}); break;
            case 'c': matched = any({"ance", "ence"}); break;
            case 'e': matched = any({"er"}); break;
            case 'i': matched = any({"ic"}); break;
            case 'l': matched = any({"able", "ible"}); break;
            case 'n': matched = any({"ant", "ement", "ment", "ent"}); break;
            case 'o':
                if (ends("ion") && j_ >= 0 && (b_[j_] == 's' || b_[j_] == 't')) {
                    matched = true;
                } else {
                    matched = ends("ou");
                }
                break;
            case 's': matched = any({"ism"}); break;
            case 't': matched = any({"ate", "iti"}); break;
            case 'u': matched = any({"ous"}); break;
            case 'v': matched = any({"ive"}); break;
            case 'z': matched = any({"ize"}); break;
            default: break;
        }
        if (matched && measure() > 1) k_ = j_;
    }

    void step5() {
        j_ = k_;
        if (b_[k_] == 'e') {
            const int m = measure();
            if (m > 1 || (m == 1 && !cvc(k_ - 1))) --k_;
        }
        if (b_[k_] == 'l' && double_cons(k_) && measure() > 1) --k_;
    }

    std::string b_;
    int k_;
    int j_ = 0;
};

bool is_ascii_lower_word(std::string_view word) {
    return !word.empty() && std::all_of(word.begin(), word.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

}  // namespace

std::string porter_stem(std::string_view word) {
    if (!is_ascii_lower_word(word)) return std::string(word);
    return PorterStemmer(std::string(word)).run();
}

}  // namespace cellrec
