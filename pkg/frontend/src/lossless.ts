/**
 * JSON parsing that preserves each number's source lexeme.
 *
 * The console must display scores exactly as the server serialized them
 * ("2.0" must not become "2"), so numbers parse to a JsonNumber carrying
 * both the numeric value and the original text.
 */

export class JsonNumber {
  constructor(readonly value: number, readonly text: string) {}
}

export type JsonValue =
  | null
  | boolean
  | string
  | JsonNumber
  | JsonValue[]
  | { [key: string]: JsonValue };

const WS = new Set([" ", "\t", "\n", "\r"]);

class Parser {
  private pos = 0;

  constructor(private readonly text: string) {}

  parse(): JsonValue {
    const value = this.value();
    this.skipWs();
    if (this.pos !== this.text.length) {
      throw new SyntaxError(`trailing characters at ${this.pos}`);
    }
    return value;
  }

  private skipWs(): void {
    while (this.pos < this.text.length && WS.has(this.text[this.pos])) this.pos++;
  }

  private value(): JsonValue {
    this.skipWs();
    const ch = this.text[this.pos];
    if (ch === "{") return this.object();
    if (ch === "[") return this.array();
    if (ch === '"') return this.string();
    if (ch === "t" || ch === "f") return this.boolean();
    if (ch === "n") return this.nullLiteral();
    return this.number();
  }

  private expect(ch: string): void {
    if (this.text[this.pos] !== ch) {
      throw new SyntaxError(`expected ${ch} at ${this.pos}`);
    }
    this.pos++;
  }

  private object(): { [key: string]: JsonValue } {
    this.expect("{");
    const out: { [key: string]: JsonValue } = {};
    this.skipWs();
    if (this.text[this.pos] === "}") {
      this.pos++;
      return out;
    }
    for (;;) {
      this.skipWs();
      const key = this.string();
      this.skipWs();
      this.expect(":");
      out[key] = this.value();
      this.skipWs();
      if (this.text[this.pos] === ",") {
        this.pos++;
        continue;
      }
      this.expect("}");
      return out;
    }
  }

  private array(): JsonValue[] {
    this.expect("[");
    const out: JsonValue[] = [];
    this.skipWs();
    if (this.text[this.pos] === "]") {
      this.pos++;
      return out;
    }
    for (;;) {
      out.push(this.value());
      this.skipWs();
      if (this.text[this.pos] === ",") {
        this.pos++;
        continue;
      }
      this.expect("]");
      return out;
    }
  }

  private string(): string {
    this.expect('"');
    let out = "";
    while (this.pos < this.text.length) {
      const ch = this.text[this.pos++];
      if (ch === '"') return out;
      if (ch === "\\") {
        const esc = this.text[this.pos++];
        if (esc === "u") {
          out += String.fromCharCode(parseInt(this.text.slice(this.pos, this.pos + 4), 16));
          this.pos += 4;
        } else {
          const map: Record<string, string> = {
            '"': '"', "\\": "\\", "/": "/", b: "\b", f: "\f", n: "\n", r: "\r", t: "\t",
          };
          if (!(esc in map)) throw new SyntaxError(`bad escape \\${esc}`);
          out += map[esc];
        }
      } else {
        out += ch;
      }
    }
    throw new SyntaxError("unterminated string");
  }

  private boolean(): boolean {
    if (this.text.startsWith("true", this.pos)) {
      this.pos += 4;
      return true;
    }
    if (this.text.startsWith("false", this.pos)) {
      this.pos += 5;
      return false;
    }
    throw new SyntaxError(`bad literal at ${this.pos}`);
  }

  private nullLiteral(): null {
    if (this.text.startsWith("null", this.pos)) {
      this.pos += 4;
      return null;
    }
    throw new SyntaxError(`bad literal at ${this.pos}`);
  }

  private number(): JsonNumber {
    const match = /^-?(?:0|[1-9][0-9]*)(?:\.[0-9]+)?(?:[eE][+-]?[0-9]+)?/.exec(
      this.text.slice(this.pos),
    );
    if (!match) throw new SyntaxError(`bad number at ${this.pos}`);
    this.pos += match[0].length;
    return new JsonNumber(Number(match[0]), match[0]);
  }
}

export function parseLossless(text: string): JsonValue {
  return new Parser(text).parse();
}

export function asObject(value: JsonValue): { [key: string]: JsonValue } {
  if (value === null || typeof value !== "object" || Array.isArray(value)
      || value instanceof JsonNumber) {
    throw new TypeError("expected a JSON object");
  }
  return value;
}

export function asArray(value: JsonValue): JsonValue[] {
  if (!Array.isArray(value)) throw new TypeError("expected a JSON array");
  return value;
}

export function asString(value: JsonValue): string {
  if (typeof value !== "string") throw new TypeError("expected a JSON string");
  return value;
}

export function asNumber(value: JsonValue): JsonNumber {
  if (!(value instanceof JsonNumber)) throw new TypeError("expected a JSON number");
  return value;
}

export function asBoolean(value: JsonValue): boolean {
  if (typeof value !== "boolean") throw new TypeError("expected a JSON boolean");
  return value;
}
