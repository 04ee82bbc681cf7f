// Form models for every workflow. Each definition declares its fields,
// mirrors the service preconditions in validate() so a shape-invalid
// payload never leaves the browser, and builds the exact JSON body in
// toPayload(). List-like inputs (parts, titles, members, filenames) are
// one-entry-per-line textareas, which keeps data entry fast on repeated
// jobs.

import type { Session } from "./session.js";

export interface FieldDef {
  name: string;
  label: string;
  kind: "text" | "textarea" | "select";
  required: boolean;
  placeholder?: string;
  options?: readonly string[];
  help?: string;
}

export type FormValues = Record<string, string>;
export type FieldErrors = Record<string, string>;

export interface FormDef {
  name: string;
  title: string;
  endpoint: string;
  submitLabel: string;
  fields: FieldDef[];
  validate(values: FormValues): FieldErrors;
  toPayload(values: FormValues, session: Session): Record<string, unknown>;
}

export const PART_KINDS = ["tape", "inlay", "other"] as const;

function lines(value: string | undefined): string[] {
  return (value ?? "")
    .split("\n")
    .map((line) => line.trim())
    .filter((line) => line.length > 0);
}

export function parseParts(value: string): { kind: string; description: string }[] {
  return lines(value).map((line) => {
    const split = line.indexOf(":");
    if (split === -1) {
      return { kind: line, description: "" };
    }
    return { kind: line.slice(0, split), description: line.slice(split + 1) };
  });
}

export function parseTitles(value: string): { side: string; text: string }[] {
  return lines(value).map((line) => {
    const split = line.indexOf(":");
    if (split === -1) {
      return { side: line, text: "" };
    }
    return { side: line.slice(0, split).trim(), text: line.slice(split + 1).trim() };
  });
}

export function isAbsoluteIri(value: string): boolean {
  if (!value || /\s/.test(value)) {
    return false;
  }
  const match = /^[A-Za-z][A-Za-z0-9+.-]*:(.+)$/.exec(value);
  return match !== null && match[1] !== undefined && match[1].length > 0;
}

function requireFields(def: FormDef, values: FormValues): FieldErrors {
  const errors: FieldErrors = {};
  for (const field of def.fields) {
    if (field.required && !(values[field.name] ?? "").trim()) {
      errors[field.name] = `${field.label} is required`;
    }
  }
  return errors;
}

const accession: FormDef = {
  name: "accession",
  title: "Accession a cassette set",
  endpoint: "accession",
  submitLabel: "Accession",
  fields: [
    { name: "inventory_id", label: "Inventory ID", kind: "text", required: true, placeholder: "FHKD-0001" },
    {
      name: "parts", label: "Parts", kind: "textarea", required: true,
      placeholder: "tape\ninlay:handwritten cover",
      help: "one per line: tape | inlay | other, optional :description",
    },
    { name: "source_name", label: "Source name", kind: "text", required: false },
    { name: "source_address", label: "Source address", kind: "text", required: false },
    { name: "source_kind", label: "Source kind", kind: "text", required: false, placeholder: "donor" },
    { name: "note", label: "Note", kind: "text", required: false },
  ],
  validate(values) {
    const errors = requireFields(this, values);
    const parts = parseParts(values["parts"] ?? "");
    if (!errors["parts"]) {
      if (parts.length === 0) {
        errors["parts"] = "at least one part is required";
      } else {
        for (const part of parts) {
          if (!(PART_KINDS as readonly string[]).includes(part.kind)) {
            errors["parts"] = `unknown part kind "${part.kind}"`;
            break;
          }
        }
      }
    }
    if ((values["source_address"] || values["source_kind"]) && !(values["source_name"] ?? "").trim()) {
      errors["source_name"] = "source name is required when source details are given";
    }
    return errors;
  },
  toPayload(values, session) {
    const payload: Record<string, unknown> = {
      operator: session.operator,
      inventory_id: (values["inventory_id"] ?? "").trim(),
      parts: parseParts(values["parts"] ?? ""),
      timespan: session.timespan(),
      note: values["note"] ?? "",
    };
    if ((values["source_name"] ?? "").trim()) {
      payload["source"] = {
        name: (values["source_name"] ?? "").trim(),
        address: (values["source_address"] ?? "").trim(),
        kind: (values["source_kind"] ?? "").trim() || "donor",
      };
    }
    return payload;
  },
};

const equipment: FormDef = {
  name: "equipment",
  title: "Register equipment",
  endpoint: "equipment",
  submitLabel: "Register",
  fields: [
    { name: "name", label: "Name", kind: "text", required: true, placeholder: "Unitra M531" },
    { name: "kind", label: "Kind", kind: "text", required: true, placeholder: "tape recorder" },
  ],
  validate(values) {
    return requireFields(this, values);
  },
  toPayload(values, session) {
    return {
      operator: session.operator,
      name: (values["name"] ?? "").trim(),
      kind: (values["kind"] ?? "").trim(),
      timespan: session.timespan(),
    };
  },
};

const holding: FormDef = {
  name: "holding",
  title: "Create a curated holding",
  endpoint: "holding",
  submitLabel: "Create holding",
  fields: [
    { name: "label", label: "Label", kind: "text", required: true },
    {
      name: "members", label: "Member set IRIs", kind: "textarea", required: true,
      help: "one IRI per line",
    },
  ],
  validate(values) {
    const errors = requireFields(this, values);
    if (!errors["members"] && lines(values["members"]).length === 0) {
      errors["members"] = "at least one member is required";
    }
    return errors;
  },
  toPayload(values, session) {
    return {
      operator: session.operator,
      label: (values["label"] ?? "").trim(),
      members: lines(values["members"]),
      timespan: session.timespan(),
    };
  },
};

const regroup: FormDef = {
  name: "regroup",
  title: "Regroup a part",
  endpoint: "regroup",
  submitLabel: "Regroup",
  fields: [
    { name: "part", label: "Part IRI", kind: "text", required: true },
    { name: "from_set", label: "From set IRI", kind: "text", required: true },
    { name: "to_set", label: "To set IRI", kind: "text", required: true },
  ],
  validate(values) {
    const errors = requireFields(this, values);
    if (!errors["to_set"] && values["to_set"] === values["from_set"]) {
      errors["to_set"] = "target set must differ from the current set";
    }
    if (!errors["to_set"] && values["to_set"] === values["part"]) {
      errors["to_set"] = "target set must differ from the part";
    }
    return errors;
  },
  toPayload(values, session) {
    return {
      operator: session.operator,
      part: (values["part"] ?? "").trim(),
      from_set: (values["from_set"] ?? "").trim(),
      to_set: (values["to_set"] ?? "").trim(),
      timespan: session.timespan(),
    };
  },
};

const digitization: FormDef = {
  name: "digitization",
  title: "Record a digitization",
  endpoint: "digitization",
  submitLabel: "Record digitization",
  fields: [
    { name: "tape", label: "Tape IRI", kind: "text", required: true },
    { name: "recorder", label: "Recorder IRI", kind: "text", required: true },
    { name: "file_path", label: "Output file path", kind: "text", required: true },
    { name: "storage_place", label: "Storage place", kind: "text", required: true },
    { name: "note", label: "Note", kind: "text", required: false },
  ],
  validate(values) {
    const errors = requireFields(this, values);
    if (!errors["recorder"] && values["recorder"] === values["tape"]) {
      errors["recorder"] = "recorder must differ from the tape";
    }
    return errors;
  },
  toPayload(values, session) {
    return {
      operator: session.operator,
      tape: (values["tape"] ?? "").trim(),
      recorder: (values["recorder"] ?? "").trim(),
      file_path: (values["file_path"] ?? "").trim(),
      storage_place: (values["storage_place"] ?? "").trim(),
      timespan: session.timespan(),
      note: values["note"] ?? "",
    };
  },
};

const photograph: FormDef = {
  name: "photograph",
  title: "Record a photograph",
  endpoint: "photograph",
  submitLabel: "Record photo",
  fields: [
    { name: "subject", label: "Subject IRI", kind: "text", required: true },
    { name: "file_path", label: "File path", kind: "text", required: true },
    { name: "place", label: "Storage place", kind: "text", required: true },
  ],
  validate(values) {
    return requireFields(this, values);
  },
  toPayload(values, session) {
    return {
      operator: session.operator,
      subject: (values["subject"] ?? "").trim(),
      file_path: (values["file_path"] ?? "").trim(),
      place: (values["place"] ?? "").trim(),
      timespan: session.timespan(),
    };
  },
};

const decompose: FormDef = {
  name: "decompose",
  title: "Transcribe inlay titles",
  endpoint: "decompose",
  submitLabel: "Transcribe",
  fields: [
    { name: "photo", label: "Inlay photo IRI", kind: "text", required: true },
    {
      name: "titles", label: "Titles", kind: "textarea", required: true,
      placeholder: "A:Boulder Dash\nB:River Raid",
      help: "one per line: side (A or B), colon, title text",
    },
  ],
  validate(values) {
    const errors = requireFields(this, values);
    if (!errors["titles"]) {
      const titles = parseTitles(values["titles"] ?? "");
      if (titles.length === 0) {
        errors["titles"] = "at least one title is required";
      } else {
        for (const title of titles) {
          if (title.side !== "A" && title.side !== "B") {
            errors["titles"] = `side must be A or B, got "${title.side}"`;
            break;
          }
          if (!title.text) {
            errors["titles"] = "title text must be non-empty";
            break;
          }
        }
      }
    }
    return errors;
  },
  toPayload(values, session) {
    return {
      operator: session.operator,
      photo: (values["photo"] ?? "").trim(),
      titles: parseTitles(values["titles"] ?? ""),
      timespan: session.timespan(),
    };
  },
};

const link: FormDef = {
  name: "link",
  title: "Link an external reference",
  endpoint: "link",
  submitLabel: "Link",
  fields: [
    { name: "subject", label: "Subject IRI", kind: "text", required: true },
    { name: "external_iri", label: "External IRI", kind: "text", required: true, placeholder: "https://..." },
    { name: "relation", label: "Relation label", kind: "text", required: true, placeholder: "describes" },
  ],
  validate(values) {
    const errors = requireFields(this, values);
    if (!errors["external_iri"] && !isAbsoluteIri((values["external_iri"] ?? "").trim())) {
      errors["external_iri"] = "must be an absolute IRI";
    }
    return errors;
  },
  toPayload(values, session) {
    return {
      operator: session.operator,
      subject: (values["subject"] ?? "").trim(),
      external_iri: (values["external_iri"] ?? "").trim(),
      relation: (values["relation"] ?? "").trim(),
      timespan: session.timespan(),
    };
  },
};

const verification: FormDef = {
  name: "verification",
  title: "Record a verification",
  endpoint: "verification",
  submitLabel: "Record verification",
  fields: [
    { name: "binary", label: "Binary IRI", kind: "text", required: true },
    { name: "claimed_title", label: "Claimed title IRI", kind: "text", required: true },
    {
      name: "outcome", label: "Outcome", kind: "select", required: true,
      options: ["confirmed", "mismatch"],
    },
  ],
  validate(values) {
    const errors = requireFields(this, values);
    if (!errors["claimed_title"] && values["claimed_title"] === values["binary"]) {
      errors["claimed_title"] = "claimed title must differ from the binary";
    }
    if (!errors["outcome"] && values["outcome"] !== "confirmed" && values["outcome"] !== "mismatch") {
      errors["outcome"] = "outcome must be confirmed or mismatch";
    }
    return errors;
  },
  toPayload(values, session) {
    return {
      operator: session.operator,
      binary: (values["binary"] ?? "").trim(),
      claimed_title: (values["claimed_title"] ?? "").trim(),
      outcome: values["outcome"] ?? "",
      timespan: session.timespan(),
    };
  },
};

export const FORM_DEFS: readonly FormDef[] = [
  accession, equipment, digitization, photograph, decompose, link,
  verification, holding, regroup,
];

export function formByName(name: string): FormDef {
  const def = FORM_DEFS.find((candidate) => candidate.name === name);
  if (!def) {
    throw new Error(`no form named ${name}`);
  }
  return def;
}
