#pragma once

#include <stdexcept>
#include <string>

namespace lamtrack {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define LAMTRACK_ERROR(Name)                         \
    struct Name : Error {                            \
        explicit Name(const std::string& what)       \
            : Error(std::string(#Name ": ") + what) {} \
    }

LAMTRACK_ERROR(DomainError);
LAMTRACK_ERROR(Infeasible);
LAMTRACK_ERROR(InvalidPants);
LAMTRACK_ERROR(InvalidGluing);
LAMTRACK_ERROR(DisconnectedError);
LAMTRACK_ERROR(TangencyMismatch);
LAMTRACK_ERROR(MalformedTrack);
LAMTRACK_ERROR(UnknownEdge);
LAMTRACK_ERROR(NotCarried);
LAMTRACK_ERROR(ParabolicOrElliptic);
LAMTRACK_ERROR(DegenerateBox);
LAMTRACK_ERROR(NotSpanning);
LAMTRACK_ERROR(SwitchViolation);
LAMTRACK_ERROR(IrrationalWeight);
LAMTRACK_ERROR(BoundaryHit);
LAMTRACK_ERROR(ParseError);

#undef LAMTRACK_ERROR

}  // namespace lamtrack
