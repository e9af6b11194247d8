#pragma once

#include <array>
#include <string_view>
#include <utility>

namespace fixtures {

/// Rock-You passwords and their CRC-32 digests around one target.
inline constexpr std::array<std::pair<std::string_view, std::string_view>, 20> kWordsRows{{
    {"tangan", "C5AEFBA5"},
    {"hornbyneho", "C3AEFBA0"},
    {"28707adnen", "C4AE9BA4"},
    {"lisa1842", "C4BECBA2"},
    {"0BChrist", "C6BFABA2"},
    {"sapphire24", "C6BFDBA2"},
    {"Kissarmy1!", "D2ADFBA6"},
    {"whateva89", "D2BE9BA3"},
    {"keno333_", "D3BDABA3"},
    {"bighottie", "D4AEABA2"},
    {"0849831211", "D4BFDBA6"},
    {"lumpibuniz", "E3ADEBA4"},
    {"sweep21", "E3BEEBA6"},
    {"577672", "E3BEFBA5"},
    {"050462654", "E5BDBBA1"},
    {"horses33", "F2BEBBA0"},
    {"zuzuloka", "F3AECBA1"},
    {"ms.jackson2008", "F3BEDBA5"},
    {"a2gfamilymaster", "F5BDDBA5"},
    {"alana123456789", "F6ADABA2"},
}};

inline constexpr std::string_view kWordsTarget = "C6BFABA2";
inline constexpr std::string_view kWordsVector = "CF26ABDF9FBBAA06";
inline constexpr std::string_view kWordsPacking = "4,5,2,3,7,1,1,7";
inline constexpr unsigned long long kRockYouSize = 14'344'391;
inline constexpr unsigned long long kFrenchWords = 605'834;

/// The PINs cracked from the 8-digit keyspace under a sha256 vector, with
/// the full SHA-256 digests.
inline constexpr std::string_view kPinVector =
    "7c27385c3f3f3f3f3f0c3f3f3f3f3f0c3f0c3f3f0c3f3f3f3f3f0c0c3f0c0c3f3f3f3f0c3f0c0c0c0c3f0c0c3f3f0c0c0c3f0c3f0c0c3f0"
    "c0c3f0c0c3f0c0c3f";
inline constexpr std::string_view kPinTarget = "b23be566408ad8d2f1ac0d84330c3127393cd1102f11fa1c038f22902f53a793";
inline constexpr std::string_view kPinCleartext = "43256891";

inline constexpr std::array<std::pair<std::string_view, std::string_view>, 9> kPinRows{{
    {"15851680", "85869d73ebe4c562cbde1688986690533ed1a52a4cc08437734934930f09f588"},
    {"18662804", "a58bbf75d9cad8fc764cb3f364823a3b69f4f3a4bc678ea473b712e673b2378d"},
    {"28251765", "b26c78a4916d348565d986d4a692603454c630ac6f99d7293f0c77bba416794f"},
    {"36823110", "b27ccbfa99fc96dc38a445accd40d148c788a93015aa937b07c41bc1b451e6b7"},
    {"37012370", "945ab8ad984bfcb38b4f36cc36b73cae36b8823445158652534d61da9843764c"},
    {"43256891", "b23be566408ad8d2f1ac0d84330c3127393cd1102f11fa1c038f22902f53a793"},
    {"56995169", "7366edc5bc43387536ba6f47ad2ac834497369564f808a14ca4983427faa57be"},
    {"60409880", "b689a9c7a5d539c8abfc197ae87a705ee351a9b8c85b548888cb81e4445981c3"},
    {"98509815", "b3859a5f5ccfef995bd723c35598d13767b176504c96b457934d6688869bea1b"},
}};

/// An NTLM target and its byte hit mask.
inline constexpr std::string_view kNtlmCleartext = "bKFQ4Q8C0";
inline constexpr std::string_view kNtlmTarget = "8AC54208A85C340AE9B8B0CDB236F14C";
inline constexpr std::string_view kNtlmMask = "C001";
inline constexpr std::string_view kNtlmTemplate = "8AC5000000000000000000000000004C";
inline constexpr unsigned long long kNtlmFound = 806'834'341;
inline constexpr unsigned long long kNtlmExpected = 806'873'234;

} // namespace fixtures
