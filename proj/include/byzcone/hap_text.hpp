#pragma once

// Canonical text form of haps and hap sets.
//
//   local:   send(2, m, 0)   recv(1, m)   ext(e)   act(a)
//   global:  gsend(1->2, m, #17)   grecv(2<-1, m, #17)   gext(1, e)   gact(1@3, a)
//            fake(1, grecv(1<-2, m, #17))    fake(1, gsend(1->2, m, #17) -> noop)
//            fail(1)   go(1)   sleep(1)   hibernate(1)
//   sets:    {h, h, ...}      ranges: {{...}, {...}}
//
// A GMI is written `#<code>`. When parsing, `#c<k>@<t>` is also accepted and
// resolved against the sender, recipient and payload of the enclosing hap.

#include <string>
#include <string_view>
#include <vector>

#include "byzcone/hap.hpp"

namespace byzcone {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line, int column);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// Character cursor with line/column bookkeeping, shared by the text parsers.
class Cursor {
public:
    explicit Cursor(std::string_view text, int line = 1, int columnOffset = 0);

    void skipSpace();
    bool atEnd();
    char peek();
    bool consume(std::string_view token);
    void expect(std::string_view token);
    int integer();
    /// Label or keyword: [A-Za-z0-9_.]+ and interior '-' not followed by '>'.
    std::string word();
    /// A word or a double-quoted string.
    std::string label();
    [[noreturn]] void fail(const std::string& message) const;
    std::size_t position() const { return pos_; }
    void restore(std::size_t pos) { pos_ = pos; }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    int line_;
    int columnOffset_;
};

std::string render(const LocalHap& h);
std::string render(const GlobalHap& h);
std::string render(const HapSet& s);
std::string render(const LocalSet& s);
std::string render(const std::vector<HapSet>& range);
std::string render(const std::vector<LocalSet>& range);

LocalHap parseLocalHap(Cursor& c);
GlobalHap parseGlobalHap(Cursor& c, const Alphabet& ab);
HapSet parseHapSet(Cursor& c, const Alphabet& ab);
LocalSet parseLocalSet(Cursor& c);
std::vector<HapSet> parseHapRange(Cursor& c, const Alphabet& ab);
std::vector<LocalSet> parseLocalRange(Cursor& c);

GlobalHap parseGlobalHap(std::string_view text, const Alphabet& ab);
LocalHap parseLocalHap(std::string_view text);
HapSet parseHapSet(std::string_view text, const Alphabet& ab);

}  // namespace byzcone
