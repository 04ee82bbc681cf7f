// Application shell: header with the sticky operator, three tabs
// (dashboard, workflows, explorer), the TOSEC upload box, and a session
// history of committed activities. All state flows through the typed
// API client; the DOM is re-rendered per view from the latest payloads.

import { ApiClient, ApiFailure } from "./api.js";
import { renderDashboard } from "./dashboard.js";
import { renderAuditTrail, renderNeighborhood } from "./explorer.js";
import { FORM_DEFS, FormDef, FormValues, formByName } from "./forms.js";
import { Session } from "./session.js";
import type { AuditEntry, ReportRow } from "./types.js";

type TabName = "dashboard" | "workflows" | "explorer" | "tosec";

export class App {
  readonly root: HTMLElement;
  readonly client: ApiClient;
  readonly session: Session;
  private activeTab: TabName = "dashboard";
  private activeForm: FormDef = FORM_DEFS[0]!;
  private prefill: FormValues = {};
  private history: AuditEntry[] = [];
  private explorerFocus = "";

  constructor(root: HTMLElement, client: ApiClient, session: Session) {
    this.root = root;
    this.client = client;
    this.session = session;
  }

  async mount(): Promise<void> {
    this.root.innerHTML = "";
    this.root.appendChild(this.renderHeader());
    const main = document.createElement("main");
    main.id = "view";
    this.root.appendChild(main);
    this.root.appendChild(this.renderHistory());
    await this.refreshOperators();
    await this.showTab("dashboard");
  }

  // -- header and session -------------------------------------------------

  private renderHeader(): HTMLElement {
    const header = document.createElement("header");
    const title = document.createElement("h1");
    title.textContent = "tapecat workbench";
    header.appendChild(title);

    const nav = document.createElement("nav");
    const tabs: [TabName, string][] = [
      ["dashboard", "Dashboard"],
      ["workflows", "Workflows"],
      ["explorer", "Explorer"],
      ["tosec", "TOSEC intake"],
    ];
    for (const [name, label] of tabs) {
      const button = document.createElement("button");
      button.type = "button";
      button.dataset["tab"] = name;
      button.textContent = label;
      button.addEventListener("click", () => void this.showTab(name));
      nav.appendChild(button);
    }
    const exportLink = document.createElement("a");
    exportLink.href = this.client.exportUrl("live");
    exportLink.textContent = "Export .ttl";
    exportLink.className = "export-link";
    nav.appendChild(exportLink);
    header.appendChild(nav);

    const operatorBox = document.createElement("div");
    operatorBox.className = "operator-box";
    const select = document.createElement("select");
    select.id = "operator-select";
    select.addEventListener("change", () => {
      this.session.setOperator(select.value);
    });
    operatorBox.appendChild(select);
    const nameInput = document.createElement("input");
    nameInput.id = "operator-name";
    nameInput.placeholder = "new operator name";
    operatorBox.appendChild(nameInput);
    const addButton = document.createElement("button");
    addButton.type = "button";
    addButton.id = "operator-add";
    addButton.textContent = "Add operator";
    addButton.addEventListener("click", () => void this.addOperator(nameInput));
    operatorBox.appendChild(addButton);
    header.appendChild(operatorBox);

    const banner = document.createElement("div");
    banner.id = "banner";
    header.appendChild(banner);
    return header;
  }

  private banner(text: string, kind: "info" | "error" = "info"): void {
    const banner = this.root.querySelector("#banner");
    if (banner) {
      banner.textContent = text;
      banner.className = kind;
    }
  }

  async refreshOperators(): Promise<void> {
    const select = this.root.querySelector<HTMLSelectElement>("#operator-select");
    if (!select) {
      return;
    }
    try {
      const { rows } = await this.client.operators();
      select.innerHTML = "";
      for (const row of rows) {
        const option = document.createElement("option");
        option.value = row.iri;
        option.textContent = row.label;
        select.appendChild(option);
      }
      const known = rows.some((row) => row.iri === this.session.operator);
      if (!known && rows.length > 0) {
        this.session.setOperator(rows[rows.length - 1]!.iri);
      }
      select.value = this.session.operator;
    } catch (error) {
      this.reportError(error);
    }
  }

  private async addOperator(input: HTMLInputElement): Promise<void> {
    if (!input.value.trim()) {
      this.banner("operator name must not be empty", "error");
      return;
    }
    try {
      const created = await this.client.addOperator(input.value.trim());
      this.session.setOperator(created.iri);
      this.history.push(created.audit);
      input.value = "";
      await this.refreshOperators();
      this.renderHistoryInto();
      this.banner("operator registered");
    } catch (error) {
      this.reportError(error);
    }
  }

  private reportError(error: unknown): void {
    if (error instanceof ApiFailure) {
      this.banner(error.busy
        ? "another activity is in progress; retry in a moment"
        : `${error.error.code}: ${error.error.message}`, "error");
    } else {
      this.banner("service unreachable", "error");
    }
  }

  // -- tabs ----------------------------------------------------------------

  private view(): HTMLElement {
    return this.root.querySelector("#view") as HTMLElement;
  }

  async showTab(tab: TabName): Promise<void> {
    this.activeTab = tab;
    for (const button of this.root.querySelectorAll("nav button")) {
      button.classList.toggle(
        "active", (button as HTMLElement).dataset["tab"] === tab);
    }
    if (tab === "dashboard") {
      await this.renderDashboardTab();
    } else if (tab === "workflows") {
      this.renderWorkflowTab();
    } else if (tab === "explorer") {
      await this.renderExplorerTab();
    } else {
      this.renderTosecTab();
    }
  }

  // -- dashboard -------------------------------------------------------------

  private async renderDashboardTab(): Promise<void> {
    const view = this.view();
    try {
      const [backlog, unverified] = await Promise.all([
        this.client.backlog(), this.client.unverified()]);
      view.innerHTML = "";
      view.appendChild(renderDashboard(backlog, unverified, {
        onDigitize: (row: ReportRow) => {
          void this.openForm("digitization", { tape: row.iri });
        },
        onVerify: (row: ReportRow) => {
          void this.openForm("verification", { binary: row.iri });
        },
        onInspect: (iri: string) => void this.explore(iri),
      }));
    } catch (error) {
      view.innerHTML = "";
      const offline = document.createElement("p");
      offline.className = "offline";
      offline.textContent = "Service unreachable; showing nothing.";
      view.appendChild(offline);
      this.reportError(error);
    }
  }

  // -- workflows -------------------------------------------------------------

  async openForm(name: string, prefill: FormValues = {}): Promise<void> {
    this.activeForm = formByName(name);
    this.prefill = prefill;
    await this.showTab("workflows");
  }

  private renderWorkflowTab(): void {
    const view = this.view();
    view.innerHTML = "";
    const picker = document.createElement("div");
    picker.className = "form-picker";
    for (const def of FORM_DEFS) {
      const button = document.createElement("button");
      button.type = "button";
      button.dataset["form"] = def.name;
      button.textContent = def.title;
      button.classList.toggle("active", def.name === this.activeForm.name);
      button.addEventListener("click", () => {
        this.activeForm = def;
        this.prefill = {};
        this.renderWorkflowTab();
      });
      picker.appendChild(button);
    }
    view.appendChild(picker);
    view.appendChild(this.renderForm(this.activeForm, this.prefill));
  }

  private renderForm(def: FormDef, prefill: FormValues): HTMLElement {
    const form = document.createElement("form");
    form.id = `form-${def.name}`;
    form.noValidate = true;
    const heading = document.createElement("h2");
    heading.textContent = def.title;
    form.appendChild(heading);

    for (const field of def.fields) {
      const row = document.createElement("label");
      row.className = "field";
      const caption = document.createElement("span");
      caption.textContent = field.label + (field.required ? " *" : "");
      row.appendChild(caption);
      let input: HTMLInputElement | HTMLTextAreaElement | HTMLSelectElement;
      if (field.kind === "textarea") {
        input = document.createElement("textarea");
      } else if (field.kind === "select") {
        input = document.createElement("select");
        for (const option of field.options ?? []) {
          const element = document.createElement("option");
          element.value = option;
          element.textContent = option;
          input.appendChild(element);
        }
      } else {
        input = document.createElement("input");
      }
      input.name = field.name;
      if (field.placeholder && "placeholder" in input) {
        input.placeholder = field.placeholder;
      }
      input.value = prefill[field.name] ?? "";
      row.appendChild(input);
      if (field.help) {
        const help = document.createElement("small");
        help.textContent = field.help;
        row.appendChild(help);
      }
      const error = document.createElement("span");
      error.className = "field-error";
      error.dataset["for"] = field.name;
      row.appendChild(error);
      form.appendChild(row);
    }

    const submit = document.createElement("button");
    submit.type = "submit";
    submit.textContent = def.submitLabel;
    form.appendChild(submit);

    const outcome = document.createElement("div");
    outcome.className = "outcome";
    form.appendChild(outcome);

    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submitForm(def, form, outcome);
    });
    return form;
  }

  private collectValues(def: FormDef, form: HTMLFormElement): FormValues {
    const values: FormValues = {};
    for (const field of def.fields) {
      const input = form.querySelector<HTMLInputElement>(`[name="${field.name}"]`);
      values[field.name] = input ? input.value : "";
    }
    return values;
  }

  private showFieldErrors(form: HTMLFormElement, errors: Record<string, string>): void {
    for (const element of form.querySelectorAll<HTMLElement>(".field-error")) {
      const name = element.dataset["for"] ?? "";
      element.textContent = errors[name] ?? "";
    }
  }

  async submitForm(def: FormDef, form: HTMLFormElement,
                   outcome: HTMLElement): Promise<void> {
    if (!this.session.operator) {
      this.banner("pick or register an operator first", "error");
      return;
    }
    const values = this.collectValues(def, form);
    const errors = def.validate(values);
    this.showFieldErrors(form, errors);
    if (Object.keys(errors).length > 0) {
      return;
    }
    outcome.innerHTML = "";
    try {
      const data = await this.client.submitWorkflow<Record<string, unknown>>(
        def.endpoint, def.toPayload(values, this.session));
      const audit = data["audit"] as AuditEntry;
      this.history.push(audit);
      this.renderHistoryInto();
      outcome.appendChild(this.renderSuccess(def, data));
      this.banner(`${def.title}: committed (${audit.statements_asserted} statements)`);
    } catch (error) {
      if (error instanceof ApiFailure) {
        if (error.busy) {
          const retry = document.createElement("button");
          retry.type = "button";
          retry.className = "retry";
          retry.textContent = "Service busy, retry";
          retry.addEventListener("click", () => {
            retry.remove();
            void this.submitForm(def, form, outcome);
          });
          outcome.appendChild(retry);
        } else if (error.error.field) {
          // map the server's offending field back onto the form
          const mapped: Record<string, string> = {};
          mapped[error.error.field] = error.error.message;
          this.showFieldErrors(form, mapped);
        }
        this.reportError(error);
      } else {
        this.reportError(error);
      }
    }
  }

  private renderSuccess(def: FormDef, data: Record<string, unknown>): HTMLElement {
    const panel = document.createElement("div");
    panel.className = "success";
    const heading = document.createElement("strong");
    heading.textContent = `${def.title}: done.`;
    panel.appendChild(heading);
    const list = document.createElement("ul");
    for (const [key, value] of Object.entries(data)) {
      if (key === "audit") {
        continue;
      }
      const values = Array.isArray(value) ? value : [value];
      for (const item of values) {
        if (typeof item !== "string" || !item) {
          continue;
        }
        const entry = document.createElement("li");
        entry.textContent = `${key}: `;
        if (item.startsWith("urn:") || item.includes("://")) {
          const link = document.createElement("a");
          link.href = "#";
          link.textContent = item;
          link.addEventListener("click", (event) => {
            event.preventDefault();
            void this.explore(item);
          });
          entry.appendChild(link);
        } else {
          entry.textContent += item;
        }
        list.appendChild(entry);
      }
    }
    panel.appendChild(list);
    return panel;
  }

  // -- explorer ---------------------------------------------------------------

  async explore(iri: string): Promise<void> {
    this.explorerFocus = iri;
    await this.showTab("explorer");
  }

  private async renderExplorerTab(): Promise<void> {
    const view = this.view();
    view.innerHTML = "";
    const bar = document.createElement("div");
    bar.className = "explorer-bar";
    const input = document.createElement("input");
    input.id = "explorer-iri";
    input.placeholder = "entity IRI";
    input.value = this.explorerFocus;
    bar.appendChild(input);
    const go = document.createElement("button");
    go.type = "button";
    go.textContent = "Explore";
    go.addEventListener("click", () => void this.explore(input.value.trim()));
    bar.appendChild(go);
    view.appendChild(bar);

    const stage = document.createElement("div");
    stage.id = "explorer-stage";
    view.appendChild(stage);
    if (!this.explorerFocus) {
      const hint = document.createElement("p");
      hint.className = "empty-state";
      hint.textContent = "Enter an IRI or click any entity link.";
      stage.appendChild(hint);
      return;
    }
    try {
      const [data, audit] = await Promise.all([
        this.client.entity(this.explorerFocus),
        this.client.audit(this.explorerFocus)]);
      const summary = document.createElement("p");
      summary.className = "entity-summary";
      summary.textContent =
        `${data.entity.label} - ${data.entity.class} ` +
        `(${data.entity.class_label})` +
        (data.entity.literal !== null ? ` = "${data.entity.literal}"` : "");
      stage.appendChild(summary);
      stage.appendChild(renderNeighborhood(data, {
        onFocus: (iri: string) => void this.explore(iri),
      }));
      stage.appendChild(renderAuditTrail(audit.trail));
    } catch (error) {
      const missing = document.createElement("p");
      missing.className = "empty-state";
      missing.textContent = `No entity at ${this.explorerFocus}`;
      stage.appendChild(missing);
      this.reportError(error);
    }
  }

  // -- TOSEC -------------------------------------------------------------------

  private renderTosecTab(): void {
    const view = this.view();
    view.innerHTML = "";
    const form = document.createElement("form");
    form.id = "form-tosec";
    form.noValidate = true;
    const heading = document.createElement("h2");
    heading.textContent = "TOSEC filename intake";
    form.appendChild(heading);
    const area = document.createElement("textarea");
    area.name = "filenames";
    area.placeholder = "Amidar (1982)(Parker Brothers)(US)[!].bin";
    form.appendChild(area);
    const submit = document.createElement("button");
    submit.type = "submit";
    submit.textContent = "Ingest";
    form.appendChild(submit);
    const outcome = document.createElement("div");
    outcome.className = "outcome";
    form.appendChild(outcome);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submitTosec(area, outcome);
    });
    view.appendChild(form);
  }

  private async submitTosec(area: HTMLTextAreaElement,
                            outcome: HTMLElement): Promise<void> {
    const filenames = area.value.split("\n")
      .map((line) => line.trim()).filter((line) => line.length > 0);
    outcome.innerHTML = "";
    if (filenames.length === 0) {
      outcome.textContent = "paste at least one filename";
      return;
    }
    try {
      const data = await this.client.tosecBatch({
        operator: this.session.operator,
        filenames,
        timespan: this.session.timespan(),
      });
      const summary = document.createElement("p");
      summary.textContent =
        `ingested ${data.ok_count}, rejected ${data.errors.length}`;
      outcome.appendChild(summary);
      if (data.errors.length > 0) {
        const list = document.createElement("ul");
        list.className = "tosec-errors";
        for (const failure of data.errors) {
          const item = document.createElement("li");
          item.textContent = `${failure.filename}: ${failure.message}`;
          list.appendChild(item);
        }
        outcome.appendChild(list);
      }
    } catch (error) {
      this.reportError(error);
    }
  }

  // -- history ------------------------------------------------------------------

  private renderHistory(): HTMLElement {
    const aside = document.createElement("aside");
    aside.id = "history";
    const heading = document.createElement("h3");
    heading.textContent = "This session";
    aside.appendChild(heading);
    const list = document.createElement("ol");
    list.id = "history-list";
    aside.appendChild(list);
    return aside;
  }

  private renderHistoryInto(): void {
    const list = this.root.querySelector("#history-list");
    if (!list) {
      return;
    }
    list.innerHTML = "";
    for (const entry of [...this.history].reverse()) {
      const item = document.createElement("li");
      item.textContent =
        `${entry.kind_label}: ${entry.note} (+${entry.entities_created}e ` +
        `+${entry.statements_asserted}s -${entry.statements_retracted}s)`;
      list.appendChild(item);
    }
  }
}
