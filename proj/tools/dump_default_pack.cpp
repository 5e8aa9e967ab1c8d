// Writes the built-in pack in file form, e.g. to refresh packs/default.pack.
#include <iostream>

#include "techdebt/content.hpp"
#include "techdebt/default_pack.hpp"

int main() { std::cout << techdebt::serialize_pack(*techdebt::default_pack()); }
