#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace xxmis {

// Shortest decimal form with 17 significant digits, locale independent.
std::string format_double(double v);

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void header(const std::vector<std::string>& cols);
    void row(const std::vector<double>& vals, const std::vector<std::string>& tail = {});

private:
    struct Impl;
    Impl* impl_;
};

// Exit codes: 0 ok, 1 numeric failure, 2 validation error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace xxmis
