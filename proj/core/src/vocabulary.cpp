#include "perfix/vocabulary.hpp"

#include <set>

#include "perfix/errors.hpp"
#include "perfix/util.hpp"

namespace perfix {
namespace {

constexpr std::string_view kHeaderPrefix = "#vocab v1 min_projects=";

// Frequently used .NET base-class-library names: LINQ, collections, strings,
// text, I/O, tasks, logging, reflection and common BCL types.
constexpr std::string_view kDefaultIdentifiers[] = {
    // LINQ
    "Aggregate", "All", "Any", "Append", "AsEnumerable", "AsParallel", "AsQueryable", "Average",
    "Cast", "Chunk", "Concat", "Contains", "Count", "DefaultIfEmpty", "Distinct", "DistinctBy",
    "ElementAt", "ElementAtOrDefault", "Empty", "Enumerable", "Except", "ExceptBy", "First",
    "FirstOrDefault", "GroupBy", "GroupJoin", "Intersect", "IntersectBy", "Join", "Last",
    "LastOrDefault", "LongCount", "Max", "MaxBy", "Min", "MinBy", "OfType", "OrderBy",
    "OrderByDescending", "Prepend", "Range", "Repeat", "Reverse", "Select", "SelectMany",
    "SequenceEqual", "Single", "SingleOrDefault", "Skip", "SkipLast", "SkipWhile", "Sum", "Take",
    "TakeLast", "TakeWhile", "ThenBy", "ThenByDescending", "ToArray", "ToDictionary",
    "ToHashSet", "ToList", "ToLookup", "Union", "UnionBy", "Where", "Zip",
    // collections
    "Add", "AddRange", "Array", "ArrayPool", "AsSpan", "AsMemory", "BinarySearch", "Capacity",
    "Clear", "ConcurrentBag", "ConcurrentDictionary", "ConcurrentQueue", "ContainsKey",
    "ContainsValue", "CopyTo", "Dequeue", "Dictionary", "Enqueue", "EnsureCapacity", "Exists",
    "Find", "FindAll", "FindIndex", "ForEach", "GetEnumerator", "GetOrAdd", "GetValueOrDefault",
    "HashSet", "ICollection", "IDictionary", "IEnumerable", "IEnumerator", "IList",
    "IReadOnlyCollection", "IReadOnlyDictionary", "IReadOnlyList", "ISet", "ImmutableArray",
    "ImmutableDictionary", "ImmutableList", "IndexOf", "Insert", "Keys", "KeyValuePair", "Length",
    "LinkedList", "List", "Peek", "Pop", "Push", "Queue", "Remove", "RemoveAll", "RemoveAt",
    "Rent", "Return", "Sort", "SortedDictionary", "SortedList", "SortedSet", "Span", "Stack",
    "TrimExcess", "TryAdd", "TryDequeue", "TryGetValue", "TryPeek", "TryRemove", "Values",
    "ReadOnlySpan", "Memory", "ReadOnlyMemory",
    // strings and text
    "Append", "AppendFormat", "AppendLine", "Compare", "CompareOrdinal", "EndsWith", "Equals",
    "Format", "Insert", "IsNullOrEmpty", "IsNullOrWhiteSpace", "LastIndexOf", "PadLeft",
    "PadRight", "Regex", "Replace", "Split", "StartsWith", "String", "StringBuilder",
    "StringComparer", "StringComparison", "Substring", "ToCharArray", "ToLower",
    "ToLowerInvariant", "ToString", "ToUpper", "ToUpperInvariant", "Trim", "TrimEnd",
    "TrimStart", "Encoding", "UTF8", "GetBytes", "GetString", "Ordinal", "OrdinalIgnoreCase",
    "InvariantCulture", "CultureInfo", "IsMatch", "Match", "Matches", "RegexOptions", "Compiled",
    // primitives and BCL
    "Object", "Int32", "Int64", "Double", "Boolean", "Char", "Byte", "Decimal", "Guid", "DateTime",
    "DateTimeOffset", "TimeSpan", "Math", "Convert", "Parse", "TryParse", "GetHashCode",
    "ReferenceEquals", "Dispose", "IDisposable", "Exception", "ArgumentException",
    "ArgumentNullException", "InvalidOperationException", "Lazy", "Value", "HasValue",
    "Nullable", "Environment", "NewLine", "Stopwatch", "Elapsed", "ElapsedMilliseconds",
    "StartNew", "UtcNow", "Now", "Buffer", "BlockCopy", "Interlocked", "Increment", "Decrement",
    "CompareExchange", "Exchange", "Volatile", "Monitor", "Enter", "Exit",
    // tasks and threading
    "Task", "ValueTask", "ConfigureAwait", "ContinueWith", "Delay", "FromResult", "GetAwaiter",
    "GetResult", "Result", "Run", "Wait", "WaitAll", "WhenAll", "WhenAny", "CompletedTask",
    "CancellationToken", "SemaphoreSlim", "WaitAsync", "Release", "Parallel", "Thread",
    "ThreadPool", "ReaderWriterLockSlim",
    // I/O and serialization
    "File", "Directory", "Path", "Stream", "MemoryStream", "FileStream", "StreamReader",
    "StreamWriter", "ReadAllText", "ReadAllBytes", "ReadAllLines", "WriteAllText", "ReadToEnd",
    "ReadToEndAsync", "ReadLine", "Write", "WriteLine", "WriteAsync", "Flush", "Combine",
    "GetFileName", "Read", "ReadAsync", "JsonSerializer", "JsonConvert", "Serialize",
    "Deserialize", "SerializeObject", "DeserializeObject", "HttpClient", "GetAsync",
    "PostAsync", "SendAsync",
    // logging
    "ILogger", "LogCritical", "LogDebug", "LogError", "LogInformation", "LogLevel", "LogTrace",
    "LogWarning", "IsEnabled", "Debug", "Trace", "Information", "Warning", "Error", "Critical",
    // reflection
    "Activator", "CreateInstance", "GetCustomAttribute", "GetCustomAttributes", "GetField",
    "GetFields", "GetInterfaces", "GetMethod", "GetMethods", "GetProperties", "GetProperty",
    "GetType", "GetValue", "Invoke", "IsAssignableFrom", "MakeGenericType", "SetValue",
    "Expression", "Compile", "Lambda",
    // keywords-in-disguise that the grammar reports as identifiers
    "nameof",
};

constexpr std::string_view kDefaultLiterals[] = {
    "0", "1", "\"\"", "true", "false", "null", "' '", "','",
};

bool storable(std::string_view text) {
  return !text.empty() && text.find_first_of("\t\n\r") == std::string_view::npos;
}

void collect(const SourceFile& file, std::set<std::string>& identifiers,
             std::set<std::string>& literals) {
  for (const auto& token : leaf_tokens(file, file.root())) {
    if (token.kind == LeafKind::kIdentifier) {
      identifiers.insert(token.text);
    } else if (token.kind == LeafKind::kLiteral && storable(token.text)) {
      literals.insert(token.text);
    }
  }
}

}  // namespace

CommonVocabulary::CommonVocabulary(Counts identifiers, Counts literals, int min_projects)
    : identifiers_(std::move(identifiers)),
      literals_(std::move(literals)),
      min_projects_(min_projects) {}

std::string CommonVocabulary::serialize() const {
  std::string out(kHeaderPrefix);
  out += std::to_string(min_projects_);
  out += '\n';
  auto emit = [&out](std::string_view kind, const Counts& counts) {
    for (const auto& [text, count] : counts) {
      out += kind;
      out += '\t';
      out += text;
      out += '\t';
      out += std::to_string(count);
      out += '\n';
    }
  };
  emit("identifier", identifiers_);
  emit("literal", literals_);
  return out;
}

CommonVocabulary CommonVocabulary::parse(std::string_view text) {
  const auto lines = split(text, '\n');
  if (lines.empty() || lines[0].substr(0, kHeaderPrefix.size()) != kHeaderPrefix) {
    throw VersionMismatch("vocabulary header must start with '" + std::string(kHeaderPrefix) + "'");
  }
  int min_projects = 0;
  try {
    min_projects = std::stoi(std::string(lines[0].substr(kHeaderPrefix.size())));
  } catch (const std::exception&) {
    throw IoError("bad vocabulary header", 0);
  }
  Counts identifiers;
  Counts literals;
  std::uint64_t offset = lines[0].size() + 1;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto line = lines[i];
    if (!line.empty()) {
      const auto fields = split(line, '\t');
      if (fields.size() != 3) throw IoError("malformed vocabulary line " + std::to_string(i + 1), offset);
      int count = 0;
      try {
        count = std::stoi(std::string(fields[2]));
      } catch (const std::exception&) {
        throw IoError("bad count on vocabulary line " + std::to_string(i + 1), offset);
      }
      if (fields[0] == "identifier") {
        identifiers.emplace(fields[1], count);
      } else if (fields[0] == "literal") {
        literals.emplace(fields[1], count);
      } else {
        throw IoError("unknown entry kind on vocabulary line " + std::to_string(i + 1), offset);
      }
    }
    offset += line.size() + 1;
  }
  return CommonVocabulary(std::move(identifiers), std::move(literals), min_projects);
}

std::string CommonVocabulary::hash() const { return sha256_hex(serialize()); }

CommonVocabulary CommonVocabulary::with_identifiers(const std::vector<std::string>& extra) const {
  Counts ids = identifiers_;
  for (const auto& id : extra) ids.emplace(id, min_projects_);
  return CommonVocabulary(std::move(ids), literals_, min_projects_);
}

CommonVocabulary build_vocabulary(const std::vector<CorpusFile>& corpus, int min_projects) {
  if (min_projects < 2) {
    throw UsageError("min_projects must be at least 2 (got " + std::to_string(min_projects) + ")");
  }
  std::map<std::string, std::pair<std::set<std::string>, std::set<std::string>>> per_project;
  for (const auto& entry : corpus) {
    auto& [ids, lits] = per_project[entry.project_id];
    collect(*entry.file, ids, lits);
  }
  if (static_cast<int>(per_project.size()) < min_projects) {
    throw InsufficientCorpus("corpus spans " + std::to_string(per_project.size()) +
                             " project(s), need at least " + std::to_string(min_projects));
  }
  CommonVocabulary::Counts id_counts;
  CommonVocabulary::Counts lit_counts;
  for (const auto& [project, sets] : per_project) {
    for (const auto& id : sets.first) ++id_counts[id];
    for (const auto& lit : sets.second) ++lit_counts[lit];
  }
  std::erase_if(id_counts, [&](const auto& kv) { return kv.second < min_projects; });
  std::erase_if(lit_counts, [&](const auto& kv) { return kv.second < min_projects; });
  return CommonVocabulary(std::move(id_counts), std::move(lit_counts), min_projects);
}

const CommonVocabulary& default_vocabulary() {
  static const CommonVocabulary vocab = [] {
    constexpr int kNominal = 2;
    CommonVocabulary::Counts ids;
    CommonVocabulary::Counts lits;
    for (const auto id : kDefaultIdentifiers) ids.emplace(id, kNominal);
    for (const auto lit : kDefaultLiterals) lits.emplace(lit, kNominal);
    return CommonVocabulary(std::move(ids), std::move(lits), kNominal);
  }();
  return vocab;
}

CommonVocabulary load_default_vocabulary() { return default_vocabulary(); }

void save_vocabulary(const CommonVocabulary& vocab, const std::filesystem::path& path) {
  write_file(path, vocab.serialize());
}

CommonVocabulary load_vocabulary(const std::filesystem::path& path) {
  return CommonVocabulary::parse(read_file(path));
}

}  // namespace perfix
