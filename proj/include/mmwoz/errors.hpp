#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mmwoz {

/// Base of every error raised by the toolkit. `code()` is a stable machine name
/// used in protocol replies and exclusion logs.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what) : std::runtime_error(what), code_(std::move(code)) {}
    [[nodiscard]] const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define MMWOZ_DEFINE_ERROR(Name, Code)                                      \
    class Name : public Error {                                             \
    public:                                                                 \
        explicit Name(const std::string& what) : Error(Code, what) {}      \
    }

MMWOZ_DEFINE_ERROR(QueryError, "QueryError");
MMWOZ_DEFINE_ERROR(NoTargetError, "NoTargetError");
MMWOZ_DEFINE_ERROR(ValueOnClickError, "ValueOnClickError");
MMWOZ_DEFINE_ERROR(MissingValueError, "MissingValueError");
MMWOZ_DEFINE_ERROR(BookingIncompleteError, "BookingIncompleteError");
MMWOZ_DEFINE_ERROR(OverflowError, "OverflowError");
MMWOZ_DEFINE_ERROR(UnknownSlotError, "UnknownSlotError");
MMWOZ_DEFINE_ERROR(UnknownOptionError, "UnknownOptionError");
MMWOZ_DEFINE_ERROR(EntityNotOnScreenError, "EntityNotOnScreenError");
MMWOZ_DEFINE_ERROR(ParseError, "ParseError");
MMWOZ_DEFINE_ERROR(IoError, "IoError");
MMWOZ_DEFINE_ERROR(UnknownIdError, "UnknownIdError");
MMWOZ_DEFINE_ERROR(SchemaError, "SchemaError");
MMWOZ_DEFINE_ERROR(UnresolvedMentionError, "UnresolvedMentionError");
MMWOZ_DEFINE_ERROR(ProtocolError, "ProtocolError");

#undef MMWOZ_DEFINE_ERROR

/// Missing or malformed database file. `domain` names the file; `record` is the
/// offending array index, or npos when the whole file is at fault.
class LoadError : public Error {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    LoadError(std::string domain, const std::string& what, std::size_t record = npos)
        : Error("LoadError", what), domain_(std::move(domain)), record_(record) {}

    [[nodiscard]] const std::string& domain() const noexcept { return domain_; }
    [[nodiscard]] std::size_t record() const noexcept { return record_; }

private:
    std::string domain_;
    std::size_t record_;
};

}  // namespace mmwoz
