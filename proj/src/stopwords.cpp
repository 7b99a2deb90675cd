#include <array>
#include <span>
#include <string_view>

namespace cometa::preprocess {

namespace {

constexpr std::string_view kEnglish[] = {
    "a", "about", "above", "after", "again", "against", "all", "also", "am", "an", "and",
    "any", "are", "aren't", "as", "at", "be", "because", "been", "before", "being", "below",
    "between", "both", "but", "by", "can", "can't", "cannot", "could", "couldn't", "did",
    "didn't", "do", "does", "doesn't", "doing", "don't", "down", "during", "each", "even",
    "ever", "few", "for", "from", "further", "had", "hadn't", "has", "hasn't", "have",
    "haven't", "having", "he", "he'd", "he'll", "he's", "her", "here", "here's", "hers",
    "herself", "him", "himself", "his", "how", "how's", "however", "i", "i'd", "i'll", "i'm",
    "i've", "if", "in", "into", "is", "isn't", "it", "it's", "its", "itself", "just",
    "let's", "like", "may", "me", "might", "more", "most", "much", "must", "mustn't", "my",
    "myself", "no", "nor", "not", "now", "of", "off", "on", "once", "one", "only", "or",
    "other", "ought", "our", "ours", "ourselves", "out", "over", "own", "said", "same",
    "says", "shan't", "she", "she'd", "she'll", "she's", "should", "shouldn't", "since", "so",
    "some", "still", "such", "than", "that", "that's", "the", "their", "theirs", "them",
    "themselves", "then", "there", "there's", "these", "they", "they'd", "they'll", "they're",
    "they've", "this", "those", "though", "through", "to", "too", "under", "until", "up",
    "upon", "us", "very", "was", "wasn't", "we", "we'd", "we'll", "we're", "we've", "were",
    "weren't", "what", "what's", "when", "when's", "where", "where's", "whether", "which",
    "while", "who", "who's", "whom", "whose", "why", "why's", "will", "with", "within",
    "without", "won't", "would", "wouldn't", "yet", "you", "you'd", "you'll", "you're",
    "you've", "your", "yours", "yourself", "yourselves",
};

constexpr std::string_view kItalian[] = {
    "a", "abbia", "abbiamo", "abbiano", "abbiate", "ad", "agl", "agli", "ai", "al", "all",
    "alla", "alle", "allo", "anche", "avemmo", "avendo", "avesse", "avessero", "avessi",
    "avessimo", "aveste", "avesti", "avete", "aveva", "avevamo", "avevano", "avevate",
    "avevi", "avevo", "avrai", "avranno", "avrebbe", "avrebbero", "avrei", "avremmo",
    "avremo", "avreste", "avresti", "avrete", "avrà", "avrò", "avuta", "avute", "avuti",
    "avuto", "c", "che", "chi", "ci", "coi", "col", "come", "con", "contro", "cui", "da",
    "dagl", "dagli", "dai", "dal", "dall", "dalla", "dalle", "dallo", "degl", "degli", "dei",
    "del", "dell", "della", "delle", "dello", "di", "dov", "dove", "e", "ebbe", "ebbero",
    "ebbi", "ed", "era", "erano", "eravamo", "eravate", "eri", "ero", "essendo", "faccia",
    "facciamo", "facciano", "facciate", "faccio", "facemmo", "facendo", "facesse",
    "facessero", "facessi", "facessimo", "faceste", "facesti", "faceva", "facevamo",
    "facevano", "facevate", "facevi", "facevo", "fai", "fanno", "farai", "faranno",
    "farebbe", "farebbero", "farei", "faremmo", "faremo", "fareste", "faresti", "farete",
    "farà", "farò", "fece", "fecero", "feci", "fosse", "fossero", "fossi", "fossimo",
    "foste", "fosti", "fu", "fui", "fummo", "furono", "gli", "ha", "hai", "hanno", "ho", "i",
    "il", "in", "io", "l", "la", "le", "lei", "li", "lo", "loro", "lui", "ma", "mi", "mia",
    "mie", "miei", "mio", "ne", "negl", "negli", "nei", "nel", "nell", "nella", "nelle",
    "nello", "noi", "non", "nostra", "nostre", "nostri", "nostro", "o", "per", "perché",
    "più", "quale", "quanta", "quante", "quanti", "quanto", "quella", "quelle", "quelli",
    "quello", "questa", "queste", "questi", "questo", "sarai", "saranno", "sarebbe",
    "sarebbero", "sarei", "saremmo", "saremo", "sareste", "saresti", "sarete", "sarà",
    "sarò", "se", "sei", "si", "sia", "siamo", "siano", "siate", "siete", "sono", "sta",
    "stai", "stando", "stanno", "starai", "staranno", "starebbe", "starebbero", "starei",
    "staremmo", "staremo", "stareste", "staresti", "starete", "starà", "starò", "stava",
    "stavamo", "stavano", "stavate", "stavi", "stavo", "stemmo", "stesse", "stessero",
    "stessi", "stessimo", "steste", "stesti", "stette", "stettero", "stetti", "stia",
    "stiamo", "stiano", "stiate", "sto", "su", "sua", "sue", "sugl", "sugli", "sui", "sul",
    "sull", "sulla", "sulle", "sullo", "suo", "suoi", "ti", "tra", "tu", "tua", "tue", "tuo",
    "tuoi", "tutti", "tutto", "un", "una", "uno", "vi", "voi", "vostra", "vostre", "vostri",
    "vostro", "è",
};

}  // namespace

std::span<const std::string_view> bundled_stopwords(std::string_view language) {
  if (language == "en") return kEnglish;
  if (language == "it") return kItalian;
  return {};
}

}  // namespace cometa::preprocess
